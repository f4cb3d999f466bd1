#include "rissk/params.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "rissk/errors.hpp"

namespace rissk {

namespace {
template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

std::string describe(const EstimationErrorMode& mode) {
    return std::visit(overloaded{
                          [](const PerfectCsi&) { return std::string("perfect"); },
                          [](const FixedError& f) {
                              std::ostringstream os;
                              os << "fixed(" << f.variance << ")";
                              return os.str();
                          },
                          [](const VariableError& v) {
                              return "variable(T=" + std::to_string(v.pilots) + ")";
                          },
                      },
                      mode);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double SystemParams::rho() const { return db_to_linear(snr_db); }

double SystemParams::error_variance() const {
    return std::visit(overloaded{
                          [](const PerfectCsi&) { return 0.0; },
                          [](const FixedError& f) { return f.variance; },
                          [this](const VariableError& v) { return 1.0 / (rho() * v.pilots); },
                      },
                      err_mode);
}

double SystemParams::xi_squared() const { return 1.0 / (1.0 + error_variance()); }

double SystemParams::xi() const { return std::sqrt(xi_squared()); }

int SystemParams::bits_per_symbol() const {
    return std::countr_zero(static_cast<unsigned>(n_tx));
}

void SystemParams::validate() const {
    if (n_elements < 1) throw ConfigError("n_elements must be >= 1");
    if (n_tx < 2 || !std::has_single_bit(static_cast<unsigned>(n_tx)))
        throw ConfigError("n_tx must be a power of two >= 2, got " + std::to_string(n_tx));
    if (!std::isfinite(snr_db)) throw ConfigError("snr_db must be finite");
    if (!(li_level >= 0.0) || !std::isfinite(li_level)) throw ConfigError("li_level must be >= 0");
    if (!(noise_power > 0.0) || !std::isfinite(noise_power))
        throw ConfigError("noise_power must be > 0");
    if (const auto* f = std::get_if<FixedError>(&err_mode)) {
        if (!(f->variance >= 0.0) || !std::isfinite(f->variance))
            throw ConfigError("fixed error variance must be >= 0");
    }
    if (const auto* v = std::get_if<VariableError>(&err_mode)) {
        if (v->pilots < 1) throw ConfigError("variable error mode needs pilots >= 1");
    }
}

int hamming_distance(int l, int m) { return std::popcount(static_cast<unsigned>(l ^ m)); }

}  // namespace rissk
