#include "rissk/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "parallel.hpp"
#include "rissk/analytic.hpp"
#include "rissk/channel.hpp"
#include "rissk/errors.hpp"
#include "rissk/link.hpp"
#include "rissk/random.hpp"
#include "rissk/specfun.hpp"

namespace rissk {

namespace {

constexpr std::int64_t kBlockSize = 1 << 16;
constexpr int kChunksPerBlock = 16;

}  // namespace

EstimateResult EstimateResult::from_counts(std::int64_t trials, std::int64_t events, std::uint64_t seed) {
    EstimateResult r;
    r.trials = trials;
    r.events = events;
    r.seed = seed;
    r.estimate = trials > 0 ? static_cast<double>(events) / static_cast<double>(trials) : 0.0;
    r.std_error = trials > 0 ? std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(trials)) : 0.0;
    return r;
}

void TrialPlan::validate() const {
    if (n_trials < 1) throw ConfigError("trial plan needs n_trials >= 1");
    if (min_events < 0) throw ConfigError("min_events must be >= 0");
}

EstimateResult run_ber(const SystemParams& params, const TrialPlan& plan) {
    params.validate();
    plan.validate();
    const int nt = params.n_tx;

    std::int64_t done = 0;
    std::int64_t bit_errors = 0;
    std::vector<std::int64_t> chunk_errors(kChunksPerBlock);

    while (done < plan.n_trials) {
        const std::int64_t block_end = std::min(plan.n_trials, done + kBlockSize);
        std::fill(chunk_errors.begin(), chunk_errors.end(), 0);
        detail::for_each_chunk(kChunksPerBlock, plan.workers, [&](int c) {
            const auto [lo, hi] = detail::chunk_range(done, block_end, kChunksPerBlock, c);
            ChannelRealization real;
            CascadeGains gains;
            std::int64_t errs = 0;
            for (std::int64_t t = lo; t < hi; ++t) {
                RandomStream rng = RandomStream::for_trial(plan.master_seed, static_cast<std::uint64_t>(t));
                const int l = rng.index(nt);
                sample_realization(params, rng, real);
                align_phases_row(real, l, gains);
                const RxSample rx = build_rx(real, gains, l, params, rng);
                const int detected = ml_detect_index(rx.y, gains, params);
                errs += hamming_distance(l, detected);
            }
            chunk_errors[c] = errs;
        });
        for (auto e : chunk_errors) bit_errors += e;
        done = block_end;
        if (plan.min_events > 0 && bit_errors >= plan.min_events) break;
    }
    return EstimateResult::from_counts(done * params.bits_per_symbol(), bit_errors, plan.master_seed);
}

std::vector<std::vector<EstimateResult>> run_outage_sweep(const SystemParams& params,
                                                          const std::vector<double>& snr_db,
                                                          const std::vector<double>& rates,
                                                          const TrialPlan& plan) {
    params.validate();
    plan.validate();
    const std::size_t ns = snr_db.size();
    const std::size_t nr = rates.size();
    const std::size_t npts = ns * nr;

    // Outage at (i, j) <=> chi^2 <= limit[i*nr + j]; SINR is monotone in chi.
    std::vector<double> limit(npts);
    for (std::size_t i = 0; i < ns; ++i) {
        const SystemParams p = params.with_snr_db(snr_db[i]);
        const double unit = sinr_from_gain(1.0, p);
        for (std::size_t j = 0; j < nr; ++j) {
            const double gth = outage_threshold(rates[j], params.n_tx);
            limit[i * nr + j] = gth / unit;
        }
    }

    std::vector<std::int64_t> events(npts, 0), trials(npts, 0);
    std::vector<char> active(npts, 1);
    std::vector<std::vector<std::int64_t>> chunk_events(kChunksPerBlock, std::vector<std::int64_t>(npts));
    std::int64_t done = 0;

    while (done < plan.n_trials && std::any_of(active.begin(), active.end(), [](char a) { return a != 0; })) {
        const std::int64_t block_end = std::min(plan.n_trials, done + kBlockSize);
        detail::for_each_chunk(kChunksPerBlock, plan.workers, [&](int c) {
            const auto [lo, hi] = detail::chunk_range(done, block_end, kChunksPerBlock, c);
            auto& ev = chunk_events[c];
            std::fill(ev.begin(), ev.end(), 0);
            for (std::int64_t t = lo; t < hi; ++t) {
                RandomStream rng = RandomStream::for_trial(plan.master_seed, static_cast<std::uint64_t>(t));
                const double chi = sample_aligned_gain(params.n_elements, rng);
                const double chi2 = chi * chi;
                for (std::size_t k = 0; k < npts; ++k)
                    if (chi2 <= limit[k]) ++ev[k];
            }
        });
        const std::int64_t block_trials = block_end - done;
        for (std::size_t k = 0; k < npts; ++k) {
            if (!active[k]) continue;
            for (int c = 0; c < kChunksPerBlock; ++c) events[k] += chunk_events[c][k];
            trials[k] += block_trials;
            if (plan.min_events > 0 && events[k] >= plan.min_events) active[k] = 0;
        }
        done = block_end;
    }

    std::vector<std::vector<EstimateResult>> out(ns, std::vector<EstimateResult>(nr));
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < nr; ++j)
            out[i][j] = EstimateResult::from_counts(trials[i * nr + j], events[i * nr + j], plan.master_seed);
    return out;
}

EstimateResult run_outage(const SystemParams& params, double rate_bps, const TrialPlan& plan) {
    return run_outage_sweep(params, {params.snr_db}, {rate_bps}, plan)[0][0];
}

ThroughputEstimate run_throughput(const SystemParams& params, const TrialPlan& plan) {
    ThroughputEstimate t;
    t.ber = run_ber(params, plan);
    const double bits = params.bits_per_symbol();
    t.value = (1.0 - t.ber.estimate) * bits;
    t.std_error = t.ber.std_error * bits;
    return t;
}

SystemParams hd_baseline(const SystemParams& fd) {
    SystemParams hd = fd;
    hd.li_level = 0.0;
    hd.n_tx = fd.n_tx * fd.n_tx;
    return hd;
}

namespace {

struct MomentSums {
    double chi = 0, chi2 = 0;
    std::complex<double> u{};
    double u_abs2 = 0, u_im2 = 0, u_im = 0;
    double prod = 0, prod2 = 0;
    std::complex<double> ph{};
    double ph_abs2 = 0;

    void merge(const MomentSums& o) {
        chi += o.chi;
        chi2 += o.chi2;
        u += o.u;
        u_abs2 += o.u_abs2;
        u_im2 += o.u_im2;
        u_im += o.u_im;
        prod += o.prod;
        prod2 += o.prod2;
        ph += o.ph;
        ph_abs2 += o.ph_abs2;
    }
};

MomentLine line(double emp, double th) {
    const double err = th != 0.0 ? std::abs(emp - th) / std::abs(th) : std::abs(emp - th);
    return {emp, th, err};
}

double normal_cdf(double x) { return 1.0 - q_func(x); }

}  // namespace

MomentAudit moment_audit(int n_elements, std::int64_t samples, std::uint64_t seed, int workers) {
    if (n_elements < 1) throw ConfigError("moment_audit needs n_elements >= 1");
    if (samples < 10000) throw ConfigError("moment_audit needs samples >= 10^4");

    constexpr int kChunks = 64;
    std::vector<MomentSums> partial(kChunks);
    std::vector<double> chi_samples(static_cast<std::size_t>(samples));

    detail::for_each_chunk(kChunks, workers, [&](int c) {
        const auto [lo, hi] = detail::chunk_range(0, samples, kChunks, c);
        MomentSums s;
        for (std::int64_t t = lo; t < hi; ++t) {
            RandomStream rng = RandomStream::for_trial(seed, static_cast<std::uint64_t>(t));
            double chi = 0.0;
            std::complex<double> mis{};
            for (int n = 0; n < n_elements; ++n) {
                const double a = rng.rayleigh();
                const double b_l = rng.rayleigh();
                const double th_l = rng.phase();
                const double b_m = rng.rayleigh();
                const double th_m = rng.phase();
                const std::complex<double> phasor = std::polar(b_m, th_l - th_m);
                const double prod = a * b_l;
                chi += prod;
                mis += a * phasor;
                s.prod += prod;
                s.prod2 += prod * prod;
                s.ph += phasor;
                s.ph_abs2 += std::norm(phasor);
            }
            const std::complex<double> u = chi - mis;
            s.chi += chi;
            s.chi2 += chi * chi;
            s.u += u;
            s.u_abs2 += std::norm(u);
            s.u_im += u.imag();
            s.u_im2 += u.imag() * u.imag();
            chi_samples[static_cast<std::size_t>(t)] = chi;
        }
        partial[c] = s;
    });

    MomentSums total;
    for (const auto& p : partial) total.merge(p);

    const double m = static_cast<double>(samples);
    const double me = m * n_elements;
    const auto chi_stats = CombinedChannelStats::for_elements(n_elements);
    const auto u_stats = DifferenceStats::for_elements(n_elements);

    MomentAudit audit;
    audit.n_elements = n_elements;
    audit.samples = samples;

    const double chi_mean = total.chi / m;
    audit.chi_mean = line(chi_mean, chi_stats.mu_chi);
    audit.chi_var = line((total.chi2 - m * chi_mean * chi_mean) / (m - 1.0), chi_stats.var_chi);

    const std::complex<double> u_mean = total.u / m;
    audit.u_mean = line(u_mean.real(), u_stats.mu_u);
    audit.u_var = line((total.u_abs2 - m * std::norm(u_mean)) / (m - 1.0), u_stats.var_u);
    const double u_im_mean = total.u_im / m;
    audit.u_imag_var = (total.u_im2 - m * u_im_mean * u_im_mean) / (m - 1.0);

    const double prod_mean = total.prod / me;
    audit.product_mean = line(prod_mean, std::numbers::pi / 4.0);
    audit.product_var =
        line((total.prod2 - me * prod_mean * prod_mean) / (me - 1.0), (16.0 - std::numbers::pi * std::numbers::pi) / 16.0);

    const std::complex<double> ph_mean = total.ph / me;
    audit.phasor_mean = line(std::abs(ph_mean), 0.0);
    audit.phasor_var = line((total.ph_abs2 - me * std::norm(ph_mean)) / (me - 1.0), 1.0);

    // KS distance of chi against the CLT Gaussian.
    std::sort(chi_samples.begin(), chi_samples.end());
    const double sd = std::sqrt(chi_stats.var_chi);
    double ks = 0.0;
    for (std::size_t i = 0; i < chi_samples.size(); ++i) {
        const double cdf = normal_cdf((chi_samples[i] - chi_stats.mu_chi) / sd);
        ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / m), std::abs(static_cast<double>(i + 1) / m - cdf)});
    }
    audit.chi_ks_distance = ks;
    audit.gaussian_fit_ok = ks < kGaussianFitThreshold;
    return audit;
}

}  // namespace rissk
