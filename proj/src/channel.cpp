#include "rissk/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rissk/errors.hpp"

namespace rissk {

namespace {

// Splits a CN(0, 1) draw into magnitude and unit phasor.
inline void draw_polar(RandomStream& rng, double& mag, cdouble& unit) {
    const double x = rng.normal();
    const double y = rng.normal();
    const double r2 = x * x + y * y;
    const double r = std::sqrt(r2);
    mag = r * 0.70710678118654752440;
    unit = r > 0.0 ? cdouble(x / r, y / r) : cdouble(1.0, 0.0);
}

}  // namespace

ChannelRealization ChannelRealization::from_polar(int n_tx, const std::vector<double>& a,
                                                  const std::vector<double>& psi, const std::vector<double>& b,
                                                  const std::vector<double>& theta, std::vector<cdouble> err) {
    const auto n = a.size();
    if (psi.size() != n || b.size() != n * n_tx || theta.size() != n * n_tx)
        throw DomainError("from_polar: inconsistent array sizes");
    ChannelRealization r;
    r.n_elements = static_cast<int>(n);
    r.n_tx = n_tx;
    r.a = a;
    r.b = b;
    r.h_unit.resize(n);
    r.g_unit.resize(b.size());
    for (std::size_t i = 0; i < n; ++i) r.h_unit[i] = std::polar(1.0, psi[i]);
    for (std::size_t k = 0; k < b.size(); ++k) r.g_unit[k] = std::polar(1.0, theta[k]);
    r.err = err.empty() ? std::vector<cdouble>(n) : std::move(err);
    if (r.err.size() != n) throw DomainError("from_polar: err size mismatch");
    return r;
}

void sample_realization(const SystemParams& params, RandomStream& rng, ChannelRealization& out) {
    const int n = params.n_elements;
    const int nt = params.n_tx;
    const auto total = static_cast<std::size_t>(n) * nt;
    out.n_elements = n;
    out.n_tx = nt;
    out.a.resize(n);
    out.h_unit.resize(n);
    out.b.resize(total);
    out.g_unit.resize(total);
    out.err.resize(n);

    for (int i = 0; i < n; ++i) draw_polar(rng, out.a[i], out.h_unit[i]);
    for (std::size_t k = 0; k < total; ++k) draw_polar(rng, out.b[k], out.g_unit[k]);
    const double var = params.error_variance();
    for (int i = 0; i < n; ++i) out.err[i] = rng.complex_normal(var);
}

ChannelRealization sample_realization(const SystemParams& params, RandomStream& rng) {
    ChannelRealization r;
    sample_realization(params, rng, r);
    return r;
}

namespace {

void prepare(const ChannelRealization& real, int l, CascadeGains& out) {
    const int nt = real.n_tx;
    const int n = real.n_elements;
    if (l < 0 || l >= nt)
        throw DomainError("antenna index " + std::to_string(l) + " out of range [0, " + std::to_string(nt) + ")");
    out.n_tx = nt;
    out.aligned = l;
    out.chi.assign(nt, 0.0);
    out.mismatch.assign(static_cast<std::size_t>(nt) * nt, cdouble{});
    for (int m = 0; m < nt; ++m) {
        const double* bm = real.b.data() + real.idx(m, 0);
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += real.a[i] * bm[i];
        out.chi[m] = s;
    }
}

void fill_row(const ChannelRealization& real, int r, CascadeGains& out) {
    const int nt = real.n_tx;
    const int n = real.n_elements;
    out.mismatch[static_cast<std::size_t>(r) * nt + r] = out.chi[r];
    const cdouble* gr = real.g_unit.data() + real.idx(r, 0);
    for (int m = 0; m < nt; ++m) {
        if (m == r) continue;
        const double* bm = real.b.data() + real.idx(m, 0);
        const cdouble* gm = real.g_unit.data() + real.idx(m, 0);
        double re = 0.0, im = 0.0;
        for (int i = 0; i < n; ++i) {
            // exp(j(theta_r - theta_m)) = g_r * conj(g_m) on unit phasors
            const double cr = gr[i].real() * gm[i].real() + gr[i].imag() * gm[i].imag();
            const double ci = gr[i].imag() * gm[i].real() - gr[i].real() * gm[i].imag();
            const double amp = real.a[i] * bm[i];
            re += amp * cr;
            im += amp * ci;
        }
        out.mismatch[static_cast<std::size_t>(r) * nt + m] = {re, im};
    }
}

}  // namespace

void align_phases(const ChannelRealization& real, int l, CascadeGains& out) {
    prepare(real, l, out);
    for (int r = 0; r < real.n_tx; ++r) fill_row(real, r, out);
}

void align_phases_row(const ChannelRealization& real, int l, CascadeGains& out) {
    prepare(real, l, out);
    fill_row(real, l, out);
}

CascadeGains align_phases(const ChannelRealization& real, int l) {
    CascadeGains g;
    align_phases(real, l, g);
    return g;
}

double phase_diff_pdf(double z) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    constexpr double norm = 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
    if (!(z > -two_pi && z < two_pi)) return 0.0;
    return (two_pi - std::abs(z)) * norm;
}

double sample_aligned_gain(int n_elements, RandomStream& rng) {
    double s = 0.0;
    for (int i = 0; i < n_elements; ++i) s += rng.rayleigh() * rng.rayleigh();
    return s;
}

}  // namespace rissk
