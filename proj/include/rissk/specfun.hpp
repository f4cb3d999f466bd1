#pragma once

#include <functional>
#include <vector>

namespace rissk {

/// Gaussian tail probability Q(x) = P(Z > x), Z ~ N(0, 1).
double q_func(double x);

double erf(double x);

/// Marcum Q-function of order 1/2, evaluated as Q(b - a) + Q(b + a).
/// Throws DomainError for negative arguments.
double marcum_q_half(double a, double b);

/// Gauss-Chebyshev (first kind) nodes cos((2q-1)pi/(2Q)), q = 1..Q.
class GcqRule {
public:
    explicit GcqRule(int order);

    int order() const { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes() const { return nodes_; }

private:
    std::vector<double> nodes_;
};

using RealFunction = std::function<double(double)>;

/// Approximates the plain integral of f over [-1, 1] by
/// (pi/Q) * sum_q sqrt(1 - w_q^2) f(w_q). The error decays as O(1/Q^2) for
/// smooth f because of the endpoint square-root behaviour of the de-weighted
/// integrand. Throws NumericalError naming the node when f is non-finite.
double gcq_integrate(const RealFunction& f, const GcqRule& rule);

/// (pi/Q) * sum_q f(w_q): exact for the weighted integral of
/// f(x)/sqrt(1 - x^2) when f is a polynomial of degree < 2Q.
double gcq_weighted_integrate(const RealFunction& f, const GcqRule& rule);

struct QuadResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    int evaluations = 0;
};

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;          // stop when error <= max(abs_tol, rel_tol * |value|)
    int max_subdivisions = 2000;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
/// Throws NumericalError (carrying the best estimate) when the tolerance is
/// not reached within max_subdivisions.
QuadResult adaptive_quad(const RealFunction& f, double lo, double hi, double tol);
QuadResult adaptive_quad(const RealFunction& f, double lo, double hi, const QuadOptions& options);

/// Integral over [lo, inf) of a Gaussian-tailed integrand. The range is
/// truncated where f drops below 1e-16 of the largest value seen while
/// stepping outward from lo, then integrated adaptively.
QuadResult adaptive_quad_to_infinity(const RealFunction& f, double lo, const QuadOptions& options,
                                     double initial_step = 1.0);

}  // namespace rissk
