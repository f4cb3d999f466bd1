#pragma once

#include <complex>
#include <vector>

#include "rissk/channel.hpp"
#include "rissk/params.hpp"
#include "rissk/random.hpp"

namespace rissk {

/// Received sample at U_A with its noise contributions kept apart.
struct RxSample {
    cdouble y;
    cdouble signal;           // sqrt(P xi^2) chi_l
    cdouble estimation_term;  // sqrt(P (1 - xi^2)) sum_n Delta h_n b_{n,l} e^{j psi_n}
    cdouble li_term;          // residual loop interference I_A
    cdouble noise_term;       // thermal noise n_A

    cdouble impairments() const { return estimation_term + li_term + noise_term; }
};

struct DetectionOutcome {
    int detected = 0;
    std::vector<double> metrics;  // ML metric per hypothesis
};

struct RxOptions {
    bool thermal_noise = true;
    bool loop_interference = true;
};

/// I_A ~ CN(0, k^2 P).
cdouble residual_li_sample(const SystemParams& params, RandomStream& rng);

/// Builds y_A for active antenna `l`; `gains` must come from `real`.
RxSample build_rx(const ChannelRealization& real, const CascadeGains& gains, int l,
                  const SystemParams& params, RandomStream& rng, const RxOptions& options = {});

/// ML detection over the hypotheses in mismatch row gains.aligned. Ties go to
/// the lowest index.
DetectionOutcome ml_detect(cdouble y, const CascadeGains& gains, const SystemParams& params);

/// Detected index only; avoids allocating the metrics vector.
int ml_detect_index(cdouble y, const CascadeGains& gains, const SystemParams& params);

/// SINR at U_A with the estimation-error interference replaced by its mean
/// power N sigma_e^2.
double sinr(const CascadeGains& gains, const SystemParams& params);

/// SINR for an arbitrary aligned gain value chi.
double sinr_from_gain(double chi, const SystemParams& params);

}  // namespace rissk
