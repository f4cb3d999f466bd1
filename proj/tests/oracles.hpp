#pragma once

// Brute-force reference values built only from adaptive_quad and <cmath>.

#include <cmath>
#include <limits>
#include <numbers>

#include "rissk/params.hpp"
#include "rissk/specfun.hpp"

namespace oracle {

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

inline rissk::QuadOptions tight() {
    rissk::QuadOptions o;
    o.abs_tol = std::numeric_limits<double>::min();
    o.rel_tol = 1e-12;
    o.max_subdivisions = 20000;
    return o;
}

/// Gaussian tail by integrating the density.
inline double q_tail(double x) {
    if (x < 0.0) return 1.0 - q_tail(-x);
    return rissk::adaptive_quad(normal_pdf, x, x + 40.0, tight()).value;
}

/// P(|X| > b) with X ~ N(a, 1).
inline double abs_normal_tail(double a, double b) {
    if (b == 0.0) return 1.0;
    const double inside =
        rissk::adaptive_quad([a](double x) { return normal_pdf(x - a); }, -b, b, tight()).value;
    return 1.0 - inside;
}

/// Unconditional PEP as E[Q(|U| sqrt(varsigma) / 2)] with U ~ N(N pi/4, N(32 - pi^2)/16).
inline double pep_by_u(int n, double varsigma) {
    const double pi = std::numbers::pi;
    const double mu = n * pi / 4.0;
    const double sd = std::sqrt(n * (32.0 - pi * pi) / 16.0);
    const double g = std::sqrt(varsigma) / 2.0;
    auto f = [&](double u) {
        return normal_pdf((u - mu) / sd) / sd * 0.5 * std::erfc(std::abs(u) * g / std::numbers::sqrt2);
    };
    double lo = mu - 15.0 * sd, hi = mu + 15.0 * sd;
    double total = 0.0;
    // split at 0 where |u| has a kink
    if (lo < 0.0 && hi > 0.0) {
        total += rissk::adaptive_quad(f, lo, 0.0, tight()).value;
        lo = 0.0;
    }
    total += rissk::adaptive_quad(f, lo, hi, tight()).value;
    return total;
}

/// P(chi^2 <= limit) with chi ~ N(mu, var).
inline double gaussian_square_cdf(double mu, double var, double limit) {
    if (limit <= 0.0) return 0.0;
    const double r = std::sqrt(limit);
    const double sd = std::sqrt(var);
    return rissk::adaptive_quad([&](double x) { return normal_pdf((x - mu) / sd) / sd; }, -r, r, tight()).value;
}

/// Natural-binary Hamming distance summed over ordered antenna pairs.
inline long hamming_pair_sum(int n_tx) {
    long s = 0;
    for (int l = 0; l < n_tx; ++l)
        for (int m = 0; m < n_tx; ++m) {
            int x = l ^ m;
            while (x) {
                s += x & 1;
                x >>= 1;
            }
        }
    return s;
}

}  // namespace oracle
