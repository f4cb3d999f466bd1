#pragma once

#include <string>
#include <variant>

#include "rissk/params.hpp"

namespace rissk {

/// Which coefficient multiplies varsigma*x/sin^2(theta) in the Craig-form
/// exponent of the unconditional PEP integral.
///  - consistent: 1/8, matching the conditional PEP Q(sqrt(P xi^2 x / (2D)))
///    and the Chiani-type upper bound.
///  - verbatim:   1/4, the coefficient as printed in the final integral.
enum class CraigScaling { consistent, verbatim };

/// CLT moments of the aligned cascade gain chi_l.
struct CombinedChannelStats {
    double mu_chi;   // N pi / 4
    double var_chi;  // N (16 - pi^2) / 16
    double lambda;   // mu_chi^2

    static CombinedChannelStats for_elements(int n_elements);
};

/// Moments of u = chi_l - chi_lhat under the CLT model.
struct DifferenceStats {
    double mu_u;   // N pi / 4
    double var_u;  // N (32 - pi^2) / 16

    static DifferenceStats for_elements(int n_elements);
};

struct PepInputs {
    int n_elements = 0;
    double varsigma = 0.0;  // 2 P xi^2 / (P (1 - xi^2) N sigma_e^2 + P k^2 + N0)
    double tau = 0.0;       // sqrt(2/((32 - pi^2) N pi)) exp(-pi^2 N / (64 - 2 pi^2))
    double log_tau = 0.0;
    CraigScaling scaling = CraigScaling::consistent;

    static PepInputs from_params(const SystemParams& params,
                                 CraigScaling scaling = CraigScaling::consistent);
    /// High-SNR limit: varsigma -> 2 xi^2 / ((1 - xi^2) N sigma_e^2 + k^2).
    /// varsigma is +inf when both impairments vanish.
    static PepInputs asymptotic(const SystemParams& params,
                                CraigScaling scaling = CraigScaling::consistent);
};

double tau_constant(int n_elements);

/// Density of X = U^2 with U ~ N(mu_u, var_u). Throws DomainError for x < 0.
double pdf_x(double x, int n_elements);

/// Integrand of the unconditional PEP over theta in (0, pi/2], including the
/// 2 tau / sqrt(pi) prefactor.
double pep_theta_integrand(double theta, const PepInputs& in);

double pep_exact(const PepInputs& in);
double pep_exact(const SystemParams& params);
double pep_gcq(const PepInputs& in, int order);
double pep_gcq(const SystemParams& params, int order);
double pep_upper(const PepInputs& in);
double pep_upper(const SystemParams& params);

/// Value with a flag set when the result is a degenerate limit rather than a
/// computed quantity.
struct FlaggedValue {
    double value = 0.0;
    bool degenerate = false;
};

/// pep_exact at the high-SNR varsigma. Degenerate (0) without impairments.
FlaggedValue pep_asymptotic(const SystemParams& params,
                            CraigScaling scaling = CraigScaling::consistent);

struct PepBreakdown {
    double exact = 0.0;
    double gcq = 0.0;
    double upper = 0.0;
    double asymptotic = 0.0;
    int gcq_order = 0;
};

PepBreakdown pep_breakdown(const SystemParams& params, int gcq_order = 20);

struct Exact {};
struct Gcq {
    int order = 20;
};
struct Upper {};
struct Asymptotic {};
using PepMethod = std::variant<Exact, Gcq, Upper, Asymptotic>;

std::string method_name(const PepMethod& m);
PepMethod parse_method(const std::string& name, int gcq_order = 20);

/// Sum over ordered pairs of Hamming distances, divided by N_t log2(N_t)
/// when normalized.
double hamming_weight(int n_tx, bool normalized = true);

/// Union-bound ABEP; exact for N_t = 2.
double abep(const SystemParams& params, const PepMethod& method, bool normalized = true);

/// gamma_th = 2^(R - log2 N_t) - 1.
double outage_threshold(double rate_bps, int n_tx);

/// 1 - Q_{1/2}(a, b). Degenerate (0) when gamma_th <= 0.
FlaggedValue outage_closed(const SystemParams& params, double rate_bps);
FlaggedValue outage_asymptotic(const SystemParams& params, double rate_bps);

/// Marcum arguments (a, b) used by outage_closed.
struct MarcumArgs {
    double a;
    double b;
};
MarcumArgs outage_marcum_args(const SystemParams& params, double rate_bps);

/// (1 - ABEP) log2(N_t) / T_s with T_s = 1.
double throughput_closed(const SystemParams& params, const PepMethod& method);

}  // namespace rissk
