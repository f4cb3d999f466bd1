#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rissk/analytic.hpp"
#include "rissk/channel.hpp"
#include "rissk/errors.hpp"
#include "rissk/link.hpp"
#include "rissk/montecarlo.hpp"

using namespace rissk;

namespace {

SystemParams make(int n, double snr_db, double k2, EstimationErrorMode mode, int nt = 2) {
    SystemParams p;
    p.n_elements = n;
    p.n_tx = nt;
    p.snr_db = snr_db;
    p.li_level = k2;
    p.err_mode = mode;
    return p;
}

TrialPlan plan(std::uint64_t seed, std::int64_t trials, int workers = 1, std::int64_t min_events = 0) {
    TrialPlan t;
    t.master_seed = seed;
    t.n_trials = trials;
    t.workers = workers;
    t.min_events = min_events;
    return t;
}

bool same(const EstimateResult& a, const EstimateResult& b) {
    return a.trials == b.trials && a.events == b.events && a.estimate == b.estimate && a.std_error == b.std_error &&
           a.seed == b.seed;
}

}  // namespace

TEST_CASE("EstimateResult invariants") {
    const auto r = EstimateResult::from_counts(400, 100, 7);
    CHECK(r.estimate == 0.25);
    CHECK(r.std_error == doctest::Approx(std::sqrt(0.25 * 0.75 / 400.0)));
    CHECK(r.seed == 7);
    CHECK(EstimateResult::from_counts(10, 0, 1).std_error == 0.0);
}

TEST_CASE("plans are validated") {
    const auto p = make(8, 0.0, 0.1, PerfectCsi{});
    CHECK_THROWS_AS(run_ber(p, plan(1, 0)), ConfigError);
    CHECK_THROWS_AS(run_ber(p, plan(1, 10, 1, -1)), ConfigError);
    auto bad = p;
    bad.n_tx = 3;
    CHECK_THROWS_AS(run_ber(bad, plan(1, 10)), ConfigError);
}

TEST_CASE("results do not depend on the worker count") {
    const auto p = make(16, -12.0, 0.1, FixedError{0.3}, 4);
    const auto ref = run_ber(p, plan(42, 150000, 1));
    CHECK(ref.events > 0);
    for (int w : {3, 8}) CHECK(same(run_ber(p, plan(42, 150000, w)), ref));
    CHECK_FALSE(same(run_ber(p, plan(43, 150000, 1)), ref));

    const auto early = run_ber(p, plan(42, 1000000, 1, 2000));
    CHECK(early.events >= 2000);
    CHECK(early.trials % 65536 == 0);
    CHECK(early.trials < 1000000);
    CHECK(same(run_ber(p, plan(42, 1000000, 4, 2000)), early));

    const auto o = make(50, -30.0, 0.1, FixedError{0.1});
    const auto o1 = run_outage(o, 3.0, plan(5, 100000, 1));
    CHECK(same(run_outage(o, 3.0, plan(5, 100000, 5)), o1));
}

TEST_CASE("trials count transmitted bits") {
    const auto p = make(8, -20.0, 0.0, PerfectCsi{}, 8);
    const auto r = run_ber(p, plan(3, 20000));
    CHECK(r.trials == 20000 * 3);
}

TEST_CASE("std_error halves when trials quadruple") {
    const auto p = make(16, -14.0, 0.1, FixedError{0.3});
    const auto a = run_ber(p, plan(11, 100000));
    const auto b = run_ber(p, plan(12, 400000));
    CHECK(a.estimate > 0.01);
    CHECK(a.std_error / b.std_error == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("noiseless limit") {
    const auto r = run_ber(make(64, 60.0, 0.0, PerfectCsi{}), plan(13, 100000));
    CHECK(r.events == 0);
    CHECK(r.estimate == 0.0);
}

TEST_CASE("error floor") {
    // At N=25, sigma_e^2=0.1 no errors occur at desk scale, so the plateau is
    // also checked where the floor is measurable.
    const auto p = make(25, 20.0, 0.1, FixedError{0.1});
    const auto a = run_ber(p, plan(14, 200000));
    const auto b = run_ber(p.with_snr_db(40.0), plan(15, 200000));
    CHECK(std::abs(a.estimate - b.estimate) <= 2.0 * std::hypot(a.std_error, b.std_error));

    const auto q = make(9, 40.0, 0.1, FixedError{1.0});
    const auto c = run_ber(q, plan(16, 200000));
    const auto d = run_ber(q.with_snr_db(60.0), plan(17, 200000));
    MESSAGE("N=9 floor: " << c.estimate << " +- " << c.std_error << " vs " << d.estimate << " +- " << d.std_error);
    CHECK(c.estimate > 0.01);
    CHECK(std::abs(c.estimate - d.estimate) <= 2.0 * std::hypot(c.std_error, d.std_error));
}

TEST_CASE("analytic deep-tail point shows no errors") {
    // abep(Exact) is about 5e-12 here.
    const auto p = make(256, 0.0, 0.1, FixedError{1.0});
    CHECK(abep(p, Exact{}) < 1e-10);
    const auto r = run_ber(p, plan(18, 1000000, 0));
    CHECK(r.events == 0);
}

TEST_CASE("outage with a zero threshold") {
    const auto r = run_outage(make(16, -30.0, 0.1, FixedError{0.1}), 1.0, plan(19, 50000));
    CHECK(r.events == 0);
    CHECK(outage_threshold(3.0, 2) == 3.0);
}

TEST_CASE("outage simulation against a direct realization loop") {
    const auto base = make(50, 0.0, 0.1, FixedError{0.1});
    double db = -45.0;
    while (outage_closed(base.with_snr_db(db), 3.0).value > 0.5) db += 0.5;
    const auto p = base.with_snr_db(db);
    const auto engine = run_outage(p, 3.0, plan(20, 200000));

    const double gth = outage_threshold(3.0, 2);
    RandomStream rng(21);
    ChannelRealization real;
    CascadeGains g;
    const int trials = 200000;
    int events = 0;
    for (int t = 0; t < trials; ++t) {
        sample_realization(p, rng, real);
        align_phases_row(real, 0, g);
        events += sinr(g, p) <= gth;
    }
    const double direct = double(events) / trials;
    const double se = std::hypot(engine.std_error, std::sqrt(direct * (1.0 - direct) / trials));
    MESSAGE("outage at " << db << " dB: engine " << engine.estimate << ", direct " << direct);
    CHECK(engine.estimate > 0.1);
    CHECK(std::abs(engine.estimate - direct) <= 4.0 * se);
}

TEST_CASE("outage sweep equals individual runs") {
    const auto p = make(100, 0.0, 0.1, FixedError{0.1});
    const std::vector<double> snrs{-36.0, -34.0, -32.0};
    const std::vector<double> rates{3.0, 5.0};
    const auto tp = plan(22, 70000, 2);
    const auto sweep = run_outage_sweep(p, snrs, rates, tp);
    REQUIRE(sweep.size() == 3);
    for (std::size_t i = 0; i < snrs.size(); ++i)
        for (std::size_t j = 0; j < rates.size(); ++j)
            CHECK(same(sweep[i][j], run_outage(p.with_snr_db(snrs[i]), rates[j], tp)));
    // common random numbers: outage is monotone along both axes
    for (std::size_t i = 0; i + 1 < snrs.size(); ++i) CHECK(sweep[i + 1][0].events <= sweep[i][0].events);
    for (std::size_t i = 0; i < snrs.size(); ++i) CHECK(sweep[i][1].events >= sweep[i][0].events);
}

TEST_CASE("outage simulation tracks the closed form") {
    // The closed form uses a Gaussian model of chi; across the transition it
    // stays within 0.01 of simulation at N=200.
    const auto p = make(200, 0.0, 0.1, FixedError{0.1});
    std::vector<double> snrs;
    for (double db = -42.0; db <= -34.0; db += 1.0) snrs.push_back(db);
    const auto sweep = run_outage_sweep(p, snrs, {3.0}, plan(23, 100000));
    for (std::size_t i = 0; i < snrs.size(); ++i) {
        const double closed = outage_closed(p.with_snr_db(snrs[i]), 3.0).value;
        CHECK_MESSAGE(std::abs(sweep[i][0].estimate - closed) < 0.01, snrs[i] << " dB");
    }
    // the -10..10 dB range is far past the transition
    const auto far = run_outage_sweep(p, {-10.0, 0.0, 10.0}, {3.0}, plan(24, 100000));
    for (const auto& row : far) CHECK(row[0].events == 0);
}

TEST_CASE("throughput") {
    const auto p = make(16, -14.0, 0.1, FixedError{0.3});
    const auto t = run_throughput(p, plan(25, 100000));
    CHECK(t.value == (1.0 - t.ber.estimate) * 1.0);
    CHECK(t.std_error == t.ber.std_error);

    const auto t4 = run_throughput(make(100, 20.0, 0.1, FixedError{1.0}, 4), plan(26, 100000));
    CHECK(std::abs(t4.value - 2.0) < 1e-3);
    const auto ideal = run_throughput(make(64, 60.0, 0.0, PerfectCsi{}, 4), plan(27, 20000));
    CHECK(ideal.value == 2.0);
}

TEST_CASE("moment audit at N=64") {
    const auto a = moment_audit(64, 1000000, 28, 0);
    const double pi = std::numbers::pi;
    CHECK(a.chi_mean.theoretical == doctest::Approx(16.0 * pi));
    CHECK(a.u_var.theoretical == doctest::Approx(64.0 * (32.0 - pi * pi) / 16.0));
    CHECK(a.chi_mean.relative_error < 0.01);
    CHECK(a.chi_var.relative_error < 0.01);
    CHECK(a.u_mean.relative_error < 0.01);
    CHECK(a.u_var.relative_error < 0.02);
    CHECK(a.product_mean.relative_error < 0.01);
    CHECK(a.product_var.relative_error < 0.01);
    CHECK(a.phasor_mean.empirical < 0.005);
    CHECK(a.phasor_var.relative_error < 0.01);
    CHECK(a.u_imag_var == doctest::Approx(32.0).epsilon(0.02));
    CHECK(a.gaussian_fit_ok);
    CHECK(a.chi_ks_distance < kGaussianFitThreshold);
}

TEST_CASE("moment audit flags a single element") {
    const auto a = moment_audit(1, 100000, 29, 0);
    CHECK_FALSE(a.gaussian_fit_ok);
    CHECK(a.chi_ks_distance > kGaussianFitThreshold);
    CHECK_FALSE(moment_audit(9, 100000, 30, 0).gaussian_fit_ok);
    CHECK_THROWS_AS(moment_audit(8, 100, 1), ConfigError);
}

TEST_CASE("half-duplex baseline") {
    const auto fd = make(400, -30.0, 0.3, FixedError{0.1}, 2);
    const auto hd = hd_baseline(fd);
    CHECK(hd.li_level == 0.0);
    CHECK(hd.n_tx == 4);
    CHECK(hd.n_elements == 400);
    CHECK(hd.snr_db == -30.0);
    CHECK(hd_baseline(make(10, 0.0, 0.1, PerfectCsi{}, 4)).n_tx == 16);
}
