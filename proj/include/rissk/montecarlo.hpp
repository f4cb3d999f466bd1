#pragma once

#include <cstdint>
#include <vector>

#include "rissk/params.hpp"

namespace rissk {

/// Bernoulli tally. For BER runs one observation is one transmitted bit.
struct EstimateResult {
    std::int64_t trials = 0;
    std::int64_t events = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t seed = 0;

    static EstimateResult from_counts(std::int64_t trials, std::int64_t events, std::uint64_t seed);
};

struct TrialPlan {
    std::uint64_t master_seed = 1;
    std::int64_t n_trials = 100000;
    std::int64_t min_events = 0;  // stop early once reached (0: run everything)
    int workers = 0;              // 0: hardware concurrency

    void validate() const;
};

/// BER of the ML detector. Each trial draws the active antenna uniformly,
/// a fresh channel and noise; bit errors are counted by Hamming distance of
/// natural-binary antenna labels. With min_events > 0 the run stops at the
/// first block boundary where the bit-error count reaches min_events.
EstimateResult run_ber(const SystemParams& params, const TrialPlan& plan);

/// Outage frequency of sinr() <= gamma_th with gamma_th from the target rate.
EstimateResult run_outage(const SystemParams& params, double rate_bps, const TrialPlan& plan);

/// Outage over a grid of SNRs and rates sharing one set of channel draws
/// (common random numbers). Element [i][j] corresponds to snr_db[i], rates[j]
/// and is identical to run_outage at that point with the same plan.
std::vector<std::vector<EstimateResult>> run_outage_sweep(const SystemParams& params,
                                                          const std::vector<double>& snr_db,
                                                          const std::vector<double>& rates,
                                                          const TrialPlan& plan);

struct ThroughputEstimate {
    double value = 0.0;
    double std_error = 0.0;
    EstimateResult ber;
};

/// (1 - BER) log2(N_t) / T_s, T_s = 1.
ThroughputEstimate run_throughput(const SystemParams& params, const TrialPlan& plan);

/// Half-duplex comparison link: no loop interference and N_t squared, so the
/// two directions served in separate slots carry the same bits per channel
/// use as the full-duplex link.
SystemParams hd_baseline(const SystemParams& fd);

struct MomentLine {
    double empirical = 0.0;
    double theoretical = 0.0;
    double relative_error = 0.0;  // |emp - th| / |th|; absolute error when th == 0
};

struct MomentAudit {
    int n_elements = 0;
    std::int64_t samples = 0;
    MomentLine chi_mean, chi_var;          // chi_l
    MomentLine u_mean, u_var;              // u = chi_l - mismatch(l, lhat), complex variance
    MomentLine product_mean, product_var;  // per-element a_n b_{n,l}
    MomentLine phasor_mean, phasor_var;    // b_{n,lhat} exp(j(theta_l - theta_lhat)); |mean| vs 0
    double u_imag_var = 0.0;               // variance of Im(u), N/2 in theory
    double chi_ks_distance = 0.0;          // KS distance of standardized chi_l to N(0,1)
    bool gaussian_fit_ok = false;          // chi_ks_distance below threshold
};

/// Empirical vs CLT moments. Requires samples >= 10^4.
MomentAudit moment_audit(int n_elements, std::int64_t samples, std::uint64_t seed, int workers = 0);

/// Threshold on the KS distance above which the Gaussian model of chi_l is flagged.
inline constexpr double kGaussianFitThreshold = 0.02;

}  // namespace rissk
