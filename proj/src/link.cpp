#include "rissk/link.hpp"

#include <cmath>
#include <limits>

#include "rissk/errors.hpp"

namespace rissk {

cdouble residual_li_sample(const SystemParams& params, RandomStream& rng) {
    return rng.complex_normal(params.li_level * params.p_tx());
}

RxSample build_rx(const ChannelRealization& real, const CascadeGains& gains, int l,
                  const SystemParams& params, RandomStream& rng, const RxOptions& options) {
    if (l < 0 || l >= real.n_tx) throw DomainError("antenna index out of range");
    if (gains.aligned != l) throw DomainError("build_rx: gains are aligned for a different antenna");
    const double p = params.p_tx();
    const double xi2 = params.xi_squared();

    RxSample rx;
    rx.signal = std::sqrt(p * xi2) * gains.chi[l];

    if (xi2 < 1.0) {
        double re = 0.0, im = 0.0;
        const double* bl = real.b.data() + real.idx(l, 0);
        for (int n = 0; n < real.n_elements; ++n) {
            const cdouble t = real.err[n] * real.h_unit[n];
            re += bl[n] * t.real();
            im += bl[n] * t.imag();
        }
        rx.estimation_term = std::sqrt(p * (1.0 - xi2)) * cdouble(re, im);
    }
    if (options.loop_interference) rx.li_term = residual_li_sample(params, rng);
    if (options.thermal_noise) rx.noise_term = rng.complex_normal(params.noise_power);

    rx.y = rx.signal + rx.estimation_term + rx.li_term + rx.noise_term;
    return rx;
}

DetectionOutcome ml_detect(cdouble y, const CascadeGains& gains, const SystemParams& params) {
    const double scale = std::sqrt(params.p_tx() * params.xi_squared());
    DetectionOutcome out;
    out.metrics.resize(gains.n_tx);
    double best = std::numeric_limits<double>::infinity();
    for (int m = 0; m < gains.n_tx; ++m) {
        const double metric = std::norm(y - scale * gains.at(gains.aligned, m));
        out.metrics[m] = metric;
        if (metric < best) {
            best = metric;
            out.detected = m;
        }
    }
    return out;
}

int ml_detect_index(cdouble y, const CascadeGains& gains, const SystemParams& params) {
    const double scale = std::sqrt(params.p_tx() * params.xi_squared());
    double best = std::numeric_limits<double>::infinity();
    int detected = 0;
    for (int m = 0; m < gains.n_tx; ++m) {
        const double metric = std::norm(y - scale * gains.at(gains.aligned, m));
        if (metric < best) {
            best = metric;
            detected = m;
        }
    }
    return detected;
}

double sinr_from_gain(double chi, const SystemParams& params) {
    const double p = params.p_tx();
    const double xi2 = params.xi_squared();
    const double se2 = params.error_variance();
    const double interference =
        p * (1.0 - xi2) * params.n_elements * se2 + p * params.li_level + params.noise_power;
    return p * xi2 * chi * chi / interference;
}

double sinr(const CascadeGains& gains, const SystemParams& params) {
    return sinr_from_gain(gains.chi[gains.aligned], params);
}

}  // namespace rissk
