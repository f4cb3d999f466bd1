#include "rissk/analytic.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rissk/errors.hpp"
#include "rissk/specfun.hpp"

namespace rissk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;
constexpr double kC = 32.0 - kPi2;  // recurring 32 - pi^2

double craig_coefficient(CraigScaling s) { return s == CraigScaling::consistent ? 0.125 : 0.25; }

// sigma_e^2 in the rho -> infinity limit; the pilot-driven variance vanishes.
double limiting_error_variance(const SystemParams& params) {
    if (std::holds_alternative<VariableError>(params.err_mode)) return 0.0;
    return params.error_variance();
}

void require_elements(int n) {
    if (n < 1) throw DomainError("n_elements must be >= 1");
}

}  // namespace

CombinedChannelStats CombinedChannelStats::for_elements(int n) {
    require_elements(n);
    const double mu = n * kPi / 4.0;
    return {mu, n * (16.0 - kPi2) / 16.0, mu * mu};
}

DifferenceStats DifferenceStats::for_elements(int n) {
    require_elements(n);
    return {n * kPi / 4.0, n * kC / 16.0};
}

double tau_constant(int n) { return std::exp(-0.5 * std::log(kC * n * kPi / 2.0) - kPi2 * n / (2.0 * kC)); }

PepInputs PepInputs::from_params(const SystemParams& params, CraigScaling scaling) {
    params.validate();
    const double p = params.p_tx();
    const double xi2 = params.xi_squared();
    const double denom = p * (1.0 - xi2) * params.n_elements * params.error_variance() +
                         p * params.li_level + params.noise_power;
    PepInputs in;
    in.n_elements = params.n_elements;
    in.varsigma = 2.0 * p * xi2 / denom;
    in.log_tau = -0.5 * std::log(kC * params.n_elements * kPi / 2.0) -
                 kPi2 * params.n_elements / (2.0 * kC);
    in.tau = std::exp(in.log_tau);
    in.scaling = scaling;
    return in;
}

PepInputs PepInputs::asymptotic(const SystemParams& params, CraigScaling scaling) {
    PepInputs in = from_params(params, scaling);
    const double se2 = limiting_error_variance(params);
    const double xi2 = 1.0 / (1.0 + se2);
    const double denom = (1.0 - xi2) * params.n_elements * se2 + params.li_level;
    in.varsigma = denom > 0.0 ? 2.0 * xi2 / denom : std::numeric_limits<double>::infinity();
    return in;
}

double pdf_x(double x, int n) {
    require_elements(n);
    if (!(x >= 0.0)) throw DomainError("pdf_x requires x >= 0");
    if (x == 0.0) return std::numeric_limits<double>::infinity();
    const double log_tau = -0.5 * std::log(kC * n * kPi / 2.0) - kPi2 * n / (2.0 * kC);
    const double s = std::sqrt(x);
    const double shift = 4.0 * kPi * s / kC;
    const double base = log_tau - 0.5 * std::log(x) - 8.0 * x / (kC * n);
    // exp(shift) + exp(-shift) folded into the log to avoid overflow.
    return std::exp(base + shift) * (1.0 + std::exp(-2.0 * shift));
}

double pep_theta_integrand(double theta, const PepInputs& in) {
    const double s = std::sin(theta);
    const double s2 = s * s;
    if (s2 == 0.0 || std::isinf(in.varsigma)) return 0.0;
    const double eta = 8.0 / (in.n_elements * kC) + craig_coefficient(in.scaling) * in.varsigma / s2;
    const double b = 4.0 * kPi / kC;
    return 2.0 / std::sqrt(kPi) * std::exp(in.log_tau + b * b / (4.0 * eta)) / std::sqrt(eta);
}

double pep_exact(const PepInputs& in) {
    if (std::isinf(in.varsigma)) return 0.0;
    QuadOptions opt;
    opt.abs_tol = std::numeric_limits<double>::min();
    opt.rel_tol = 1e-10;
    opt.max_subdivisions = 4000;
    const auto r = adaptive_quad([&](double t) { return pep_theta_integrand(t, in); }, 0.0, kPi / 2.0, opt);
    return r.value;
}

double pep_exact(const SystemParams& params) { return pep_exact(PepInputs::from_params(params)); }

double pep_gcq(const PepInputs& in, int order) {
    const GcqRule rule(order);
    if (std::isinf(in.varsigma)) return 0.0;
    return gcq_integrate(
        [&](double w) { return kPi / 4.0 * pep_theta_integrand(kPi / 4.0 * w + kPi / 4.0, in); }, rule);
}

double pep_gcq(const SystemParams& params, int order) {
    return pep_gcq(PepInputs::from_params(params), order);
}

double pep_upper(const PepInputs& in) {
    if (std::isinf(in.varsigma)) return 0.0;
    const double n = in.n_elements;
    const double vs = in.varsigma;
    const double d1 = 64.0 + vs * n * kC;
    const double d2 = 48.0 + vs * n * kC;
    const double t1 = in.log_tau - std::log(3.0) + 0.5 * std::log(2.0 * kPi * n * kC / d1) +
                      32.0 * n * kPi2 / (64.0 * kC + vs * n * kC * kC);
    const double t2 = in.log_tau + 0.5 * std::log(3.0 * kPi * n * kC / (2.0 * d2)) +
                      48.0 * n * kPi2 / (96.0 * kC + 2.0 * vs * n * kC * kC);
    return std::exp(t1) + std::exp(t2);
}

double pep_upper(const SystemParams& params) { return pep_upper(PepInputs::from_params(params)); }

FlaggedValue pep_asymptotic(const SystemParams& params, CraigScaling scaling) {
    const PepInputs in = PepInputs::asymptotic(params, scaling);
    if (std::isinf(in.varsigma)) return {0.0, true};
    return {pep_exact(in), false};
}

PepBreakdown pep_breakdown(const SystemParams& params, int gcq_order) {
    const PepInputs in = PepInputs::from_params(params);
    PepBreakdown b;
    b.exact = pep_exact(in);
    b.gcq = pep_gcq(in, gcq_order);
    b.upper = pep_upper(in);
    b.asymptotic = pep_asymptotic(params).value;
    b.gcq_order = gcq_order;
    return b;
}

std::string method_name(const PepMethod& m) {
    if (std::holds_alternative<Exact>(m)) return "exact";
    if (std::holds_alternative<Gcq>(m)) return "gcq";
    if (std::holds_alternative<Upper>(m)) return "upper";
    return "asymptotic";
}

PepMethod parse_method(const std::string& name, int gcq_order) {
    if (name == "exact") return Exact{};
    if (name == "gcq") return Gcq{gcq_order};
    if (name == "upper") return Upper{};
    if (name == "asymptotic") return Asymptotic{};
    throw ConfigError("unknown analytic method '" + name + "'");
}

double hamming_weight(int n_tx, bool normalized) {
    long total = 0;
    for (int l = 0; l < n_tx; ++l)
        for (int m = 0; m < n_tx; ++m)
            if (m != l) total += hamming_distance(l, m);
    if (!normalized) return static_cast<double>(total);
    return static_cast<double>(total) / (n_tx * std::log2(static_cast<double>(n_tx)));
}

double abep(const SystemParams& params, const PepMethod& method, bool normalized) {
    params.validate();
    double pep = 0.0;
    if (std::holds_alternative<Exact>(method)) pep = pep_exact(params);
    else if (const auto* g = std::get_if<Gcq>(&method)) pep = pep_gcq(params, g->order);
    else if (std::holds_alternative<Upper>(method)) pep = pep_upper(params);
    else pep = pep_asymptotic(params).value;
    return pep * hamming_weight(params.n_tx, normalized);
}

double outage_threshold(double rate_bps, int n_tx) {
    return std::exp2(rate_bps - std::log2(static_cast<double>(n_tx))) - 1.0;
}

namespace {

FlaggedValue outage_from_args(double a, double b) {
    // 1 - [Q(b - a) + Q(b + a)] rewritten as Q(a - b) - Q(a + b) to keep
    // precision when the outage is small.
    const double v = q_func(a - b) - q_func(a + b);
    return {std::max(0.0, v), false};
}

}  // namespace

MarcumArgs outage_marcum_args(const SystemParams& params, double rate_bps) {
    params.validate();
    const auto stats = CombinedChannelStats::for_elements(params.n_elements);
    const double gth = outage_threshold(rate_bps, params.n_tx);
    const double p = params.p_tx();
    const double xi2 = params.xi_squared();
    const double z = (p * (1.0 - xi2) * params.error_variance() * params.n_elements + p * params.li_level +
                      params.noise_power) *
                     gth / (p * xi2);
    return {std::sqrt(stats.lambda / stats.var_chi), std::sqrt(std::max(0.0, z) / stats.var_chi)};
}

FlaggedValue outage_closed(const SystemParams& params, double rate_bps) {
    if (!(outage_threshold(rate_bps, params.n_tx) > 0.0)) return {0.0, true};
    const auto [a, b] = outage_marcum_args(params, rate_bps);
    return outage_from_args(a, b);
}

FlaggedValue outage_asymptotic(const SystemParams& params, double rate_bps) {
    params.validate();
    const double gth = outage_threshold(rate_bps, params.n_tx);
    if (!(gth > 0.0)) return {0.0, true};
    const auto stats = CombinedChannelStats::for_elements(params.n_elements);
    const double se2 = limiting_error_variance(params);
    const double z = (se2 * se2 * params.n_elements + (1.0 + se2) * params.li_level) * gth;
    return outage_from_args(std::sqrt(stats.lambda / stats.var_chi), std::sqrt(z / stats.var_chi));
}

double throughput_closed(const SystemParams& params, const PepMethod& method) {
    const double e = std::min(1.0, abep(params, method));
    return (1.0 - e) * params.bits_per_symbol();
}

}  // namespace rissk
