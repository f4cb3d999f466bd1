#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "oracles.hpp"
#include "rissk/channel.hpp"
#include "rissk/errors.hpp"

using namespace rissk;

namespace {

SystemParams params_for(int n, int nt, EstimationErrorMode mode = PerfectCsi{}) {
    SystemParams p;
    p.n_elements = n;
    p.n_tx = nt;
    p.err_mode = mode;
    return p;
}

}  // namespace

TEST_CASE("perfect CSI gives zero estimation error") {
    RandomStream rng(1);
    const auto r = sample_realization(params_for(32, 4), rng);
    REQUIRE(r.err.size() == 32);
    for (const auto& e : r.err) CHECK(e == cdouble(0.0, 0.0));
    CHECK(r.a.size() == 32);
    CHECK(r.b.size() == 128);
    CHECK(r.g_unit.size() == 128);
    for (double v : r.a) CHECK(v >= 0.0);
    for (const auto& u : r.h_unit) CHECK(std::abs(std::abs(u) - 1.0) < 1e-14);
}

TEST_CASE("fixed error samples carry the configured variance") {
    RandomStream rng(2);
    const auto p = params_for(1000, 2, FixedError{0.5});
    double s2 = 0.0;
    cdouble s{};
    int count = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const auto r = sample_realization(p, rng);
        for (const auto& e : r.err) {
            s += e;
            s2 += std::norm(e);
            ++count;
        }
    }
    CHECK(std::abs(s / double(count)) < 0.005);
    CHECK(std::abs(s2 / count - 0.5) < 0.01);
}

TEST_CASE("Rayleigh amplitude mean") {
    // Oracle: int_0^inf r * 2 r exp(-r^2) dr for unit-power Rayleigh.
    const double ref =
        adaptive_quad_to_infinity([](double r) { return 2.0 * r * r * std::exp(-r * r); }, 0.0, oracle::tight()).value;
    CHECK(std::abs(ref - std::sqrt(std::numbers::pi) / 2.0) < 1e-10);
    RandomStream rng(3);
    const auto p = params_for(1, 2);
    ChannelRealization r;
    double s = 0.0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
        sample_realization(p, rng, r);
        s += r.a[0];
    }
    CHECK(std::abs(s / draws - ref) < 0.002);
}

TEST_CASE("aligned gain mean at N=64") {
    RandomStream rng(4);
    const auto p = params_for(64, 2);
    ChannelRealization r;
    CascadeGains g;
    double s = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        sample_realization(p, rng, r);
        align_phases(r, 0, g);
        CHECK_FALSE(g.chi[0] <= 0.0);
        s += g.chi[0];
    }
    CHECK(std::abs(s / draws - 64.0 * std::numbers::pi / 4.0) < 0.1);
}

TEST_CASE("sample_aligned_gain has the law of chi") {
    RandomStream rng(5);
    const int draws = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double c = sample_aligned_gain(16, rng);
        s += c;
        s2 += c * c;
    }
    const double mean = s / draws;
    const double var = s2 / draws - mean * mean;
    CHECK(std::abs(mean / (16.0 * std::numbers::pi / 4.0) - 1.0) < 0.005);
    CHECK(std::abs(var / (16.0 * (16.0 - std::numbers::pi * std::numbers::pi) / 16.0) - 1.0) < 0.02);
}

TEST_CASE("identical subchannels") {
    const auto r = ChannelRealization::from_polar(2, {1.0}, {0.3}, {1.0, 1.0}, {0.7, 0.7});
    const auto g = align_phases(r, 0);
    CHECK(g.chi[0] == 1.0);
    CHECK(g.chi[1] == 1.0);
    CHECK(std::abs(g.at(0, 1) - cdouble(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(g.at(1, 0) - cdouble(1.0, 0.0)) < 1e-15);
    CHECK(r.psi(0) == doctest::Approx(0.3));
    CHECK(r.theta_g(1, 0) == doctest::Approx(0.7));
    CHECK_THROWS_AS(ChannelRealization::from_polar(2, {1.0}, {0.3}, {1.0}, {0.7, 0.7}), DomainError);
}

TEST_CASE("mismatch entries by hand") {
    // N=2, N_t=2 with chosen phases.
    const std::vector<double> a{0.5, 2.0};
    const std::vector<double> b{1.0, 3.0, 2.0, 0.25};  // row l=0 then l=1
    const std::vector<double> th{0.1, -1.2, 2.0, 0.4};
    const auto r = ChannelRealization::from_polar(2, a, {0.0, 1.0}, b, th);
    const auto g = align_phases(r, 1);
    CHECK(g.aligned == 1);
    CHECK(g.chi[0] == doctest::Approx(0.5 * 1.0 + 2.0 * 3.0));
    CHECK(g.chi[1] == doctest::Approx(0.5 * 2.0 + 2.0 * 0.25));
    const cdouble j(0.0, 1.0);
    const cdouble m10 = 0.5 * 1.0 * std::exp(j * (2.0 - 0.1)) + 2.0 * 3.0 * std::exp(j * (0.4 + 1.2));
    CHECK(std::abs(g.at(1, 0) - m10) < 1e-12);
    const cdouble m01 = 0.5 * 2.0 * std::exp(j * (0.1 - 2.0)) + 2.0 * 0.25 * std::exp(j * (-1.2 - 0.4));
    CHECK(std::abs(g.at(0, 1) - m01) < 1e-12);
}

TEST_CASE("diagonal of mismatch is real and equals chi") {
    RandomStream rng(6);
    const auto p = params_for(50, 8);
    for (int rep = 0; rep < 50; ++rep) {
        const auto r = sample_realization(p, rng);
        const int l = rng.index(8);
        const auto g = align_phases(r, l);
        for (int m = 0; m < 8; ++m) {
            CHECK(std::abs(g.at(m, m).imag()) < 1e-12);
            CHECK(g.at(m, m).real() == g.chi[m]);
        }
        CascadeGains row;
        align_phases_row(r, l, row);
        for (int m = 0; m < 8; ++m) CHECK(row.at(l, m) == g.at(l, m));
    }
}

TEST_CASE("align_phases rejects bad indices") {
    RandomStream rng(7);
    const auto r = sample_realization(params_for(4, 2), rng);
    CHECK_THROWS_AS(align_phases(r, 2), DomainError);
    CHECK_THROWS_AS(align_phases(r, -1), DomainError);
}

TEST_CASE("mismatch complex variance at N=256") {
    RandomStream rng(8);
    const auto p = params_for(256, 2);
    ChannelRealization r;
    CascadeGains g;
    const int draws = 40000;
    cdouble s{};
    double s2 = 0.0;
    for (int i = 0; i < draws; ++i) {
        sample_realization(p, rng, r);
        align_phases_row(r, 0, g);
        const cdouble m = g.at(0, 1);
        s += m;
        s2 += std::norm(m);
    }
    const cdouble mean = s / double(draws);
    const double var = s2 / draws - std::norm(mean);
    CHECK(std::abs(var / 256.0 - 1.0) < 0.03);
    CHECK(std::abs(mean) < 0.5);
}

TEST_CASE("phase_diff_pdf") {
    const double pi = std::numbers::pi;
    CHECK(phase_diff_pdf(0.0) == doctest::Approx(1.0 / (2.0 * pi)));
    CHECK(phase_diff_pdf(2.0 * pi) == 0.0);
    CHECK(phase_diff_pdf(-2.0 * pi) == 0.0);
    CHECK(phase_diff_pdf(7.0) == 0.0);
    CHECK(phase_diff_pdf(-1.0) == doctest::Approx((2.0 * pi - 1.0) / (4.0 * pi * pi)));
    CHECK(phase_diff_pdf(1.5) == doctest::Approx((2.0 * pi - 1.5) / (4.0 * pi * pi)));
    const double total = adaptive_quad(phase_diff_pdf, -2.0 * pi, 0.0, oracle::tight()).value +
                         adaptive_quad(phase_diff_pdf, 0.0, 2.0 * pi, oracle::tight()).value;
    CHECK(std::abs(total - 1.0) < 1e-10);
}

TEST_CASE("phase_diff_pdf is the convolution of two uniform densities") {
    const double pi = std::numbers::pi;
    for (double z : {-5.5, -2.0, -0.1, 0.4, 3.0, 6.0}) {
        // int f_U(x) f_U(x - z) dx over the overlap of (-pi, pi) and (z - pi, z + pi)
        const double lo = std::max(-pi, z - pi), hi = std::min(pi, z + pi);
        const double conv =
            adaptive_quad([](double) { return 1.0 / (4.0 * std::numbers::pi * std::numbers::pi); }, lo, hi, 1e-14).value;
        CHECK(std::abs(phase_diff_pdf(z) - conv) < 1e-12);
    }
}

TEST_CASE("phase difference histogram matches phase_diff_pdf") {
    const double pi = std::numbers::pi;
    const int bins = 50;
    const double width = 4.0 * pi / bins;
    std::vector<double> counts(bins, 0.0);
    RandomStream rng(9);
    const auto p = params_for(100, 2);
    ChannelRealization r;
    long total = 0;
    for (int rep = 0; rep < 2000; ++rep) {
        sample_realization(p, rng, r);
        for (int n = 0; n < p.n_elements; ++n) {
            const double z = r.theta_g(0, n) - r.theta_g(1, n);
            const int k = std::min(bins - 1, static_cast<int>((z + 2.0 * pi) / width));
            counts[k] += 1.0;
            ++total;
        }
    }
    double stat = 0.0;
    for (int k = 0; k < bins; ++k) {
        const double lo = -2.0 * pi + k * width;
        const double hi = lo + width;
        double prob = 0.0;
        // split at 0 where the density has a kink
        if (lo < 0.0 && hi > 0.0)
            prob = adaptive_quad(phase_diff_pdf, lo, 0.0, 1e-14).value + adaptive_quad(phase_diff_pdf, 0.0, hi, 1e-14).value;
        else
            prob = adaptive_quad(phase_diff_pdf, lo, hi, 1e-14).value;
        const double expected = prob * total;
        stat += (counts[k] - expected) * (counts[k] - expected) / expected;
    }
    const boost::math::chi_squared dist(bins - 1);
    const double p_value = boost::math::cdf(boost::math::complement(dist, stat));
    MESSAGE("chi2 = " << stat << ", p = " << p_value);
    CHECK(p_value > 0.01);
}

TEST_CASE("per-element statistics") {
    // a b products, the mismatch phasor term and the independence of err.
    RandomStream rng(10);
    const auto p = params_for(1000, 2, FixedError{0.2});
    ChannelRealization r;
    const int reps = 1000;
    const double count = 1000.0 * reps;
    double sp = 0.0, sp2 = 0.0;
    cdouble sz{};
    double sz2 = 0.0;
    double se = 0.0, sep = 0.0, se2 = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        sample_realization(p, rng, r);
        for (int n = 0; n < p.n_elements; ++n) {
            const double prod = r.a[n] * r.amp_b(0, n);
            sp += prod;
            sp2 += prod * prod;
            const cdouble z = r.amp_b(1, n) * r.g_unit[r.idx(0, n)] * std::conj(r.g_unit[r.idx(1, n)]);
            sz += z;
            sz2 += std::norm(z);
            const double e = r.err[n].real();
            se += e;
            se2 += e * e;
            sep += e * prod;
        }
    }
    const double pi = std::numbers::pi;
    const double mp = sp / count;
    const double vp = sp2 / count - mp * mp;
    CHECK(std::abs(mp / (pi / 4.0) - 1.0) < 0.01);
    CHECK(std::abs(vp / ((16.0 - pi * pi) / 16.0) - 1.0) < 0.01);

    const cdouble mz = sz / count;
    CHECK(std::abs(mz) < 0.005);
    CHECK(std::abs(sz2 / count - std::norm(mz) - 1.0) < 0.01);

    const double me = se / count;
    const double ve = se2 / count - me * me;
    const double corr = (sep / count - me * mp) / std::sqrt(ve * vp);
    CHECK(std::abs(corr) < 0.01);
}

TEST_CASE("sampling is reproducible from the seed") {
    const auto p = params_for(20, 4, FixedError{0.1});
    RandomStream r1(99), r2(99);
    const auto a = sample_realization(p, r1);
    const auto b = sample_realization(p, r2);
    CHECK(a.a == b.a);
    CHECK(a.b == b.b);
    CHECK(a.err == b.err);
}
