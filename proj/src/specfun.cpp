#include "rissk/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

#include "rissk/errors.hpp"

namespace rissk {

double q_func(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double erf(double x) { return std::erf(x); }

double marcum_q_half(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0)) {
        std::ostringstream os;
        os << "marcum_q_half requires a, b >= 0 (a=" << a << ", b=" << b << ")";
        throw DomainError(os.str());
    }
    return q_func(b - a) + q_func(b + a);
}

GcqRule::GcqRule(int order) {
    if (order < 1) throw DomainError("GCQ order must be >= 1");
    nodes_.resize(order);
    for (int q = 1; q <= order; ++q)
        nodes_[q - 1] = std::cos((2.0 * q - 1.0) * std::numbers::pi / (2.0 * order));
}

namespace {

double checked(const RealFunction& f, double x, int q) {
    const double v = f(x);
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite integrand at GCQ node q=" << q << " (w=" << x << ")";
        throw NumericalError(os.str());
    }
    return v;
}

}  // namespace

double gcq_integrate(const RealFunction& f, const GcqRule& rule) {
    double sum = 0.0;
    int q = 1;
    for (double w : rule.nodes()) {
        sum += std::sqrt(1.0 - w * w) * checked(f, w, q);
        ++q;
    }
    return std::numbers::pi / rule.order() * sum;
}

double gcq_weighted_integrate(const RealFunction& f, const GcqRule& rule) {
    double sum = 0.0;
    int q = 1;
    for (double w : rule.nodes()) {
        sum += checked(f, w, q);
        ++q;
    }
    return std::numbers::pi / rule.order() * sum;
}

namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo, hi, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const RealFunction& f, double lo, double hi, int& evals) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    evals += 15;
    const double value = kronrod * half;
    const double error = std::abs((kronrod - gauss) * half);
    if (!std::isfinite(value)) {
        std::ostringstream os;
        os << "non-finite integrand on [" << lo << ", " << hi << "]";
        throw NumericalError(os.str());
    }
    return {lo, hi, value, error};
}

}  // namespace

QuadResult adaptive_quad(const RealFunction& f, double lo, double hi, double tol) {
    return adaptive_quad(f, lo, hi, QuadOptions{tol, 0.0, 2000});
}

QuadResult adaptive_quad(const RealFunction& f, double lo, double hi, const QuadOptions& options) {
    if (!(lo < hi)) throw DomainError("adaptive_quad requires lo < hi");
    if (!(options.abs_tol > 0.0) && !(options.rel_tol > 0.0))
        throw DomainError("adaptive_quad requires a positive tolerance");

    int evals = 0;
    std::priority_queue<Segment> heap;
    Segment first = gk15(f, lo, hi, evals);
    double total = first.value;
    double total_err = first.error;
    heap.push(first);

    auto target = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(total)); };

    int splits = 0;
    while (total_err > target()) {
        if (splits >= options.max_subdivisions) {
            std::ostringstream os;
            os << "adaptive_quad did not converge on [" << lo << ", " << hi << "]: error estimate "
               << total_err << " after " << splits << " subdivisions";
            throw NumericalError(os.str(), total);
        }
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            // Interval cannot be split further in floating point.
            std::ostringstream os;
            os << "adaptive_quad hit roundoff limit near x=" << mid;
            throw NumericalError(os.str(), total);
        }
        const Segment left = gk15(f, worst.lo, mid, evals);
        const Segment right = gk15(f, mid, worst.hi, evals);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++splits;
    }

    // Re-sum to shed accumulated cancellation in the running totals.
    double value = 0.0, err = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {value, err, evals};
}

QuadResult adaptive_quad_to_infinity(const RealFunction& f, double lo, const QuadOptions& options,
                                     double initial_step) {
    if (!(initial_step > 0.0)) throw DomainError("initial_step must be positive");
    double peak = std::abs(f(lo));
    double step = initial_step;
    double hi = lo;
    int probes = 1;
    // Walk outward until the integrand has decayed far below its observed peak.
    for (;;) {
        hi += step;
        const double v = std::abs(f(hi));
        ++probes;
        if (!std::isfinite(v)) throw NumericalError("non-finite integrand while truncating range");
        peak = std::max(peak, v);
        if (peak > 0.0 && v < 1e-16 * peak && hi - lo > 4.0 * initial_step) break;
        if (probes > 4000) throw NumericalError("could not find a truncation point for infinite range");
        step *= 1.25;
    }
    QuadResult r = adaptive_quad(f, lo, hi, options);
    r.evaluations += probes;
    return r;
}

}  // namespace rissk
