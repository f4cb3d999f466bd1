#pragma once

#include <complex>
#include <vector>

#include "rissk/params.hpp"
#include "rissk/random.hpp"

namespace rissk {

using cdouble = std::complex<double>;

/// One draw of every per-element quantity on the U_B -> RIS B -> U_A link.
/// Phases are kept as unit phasors; antenna-indexed arrays are row-major
/// with entry (l, n) at l * N + n.
struct ChannelRealization {
    int n_elements = 0;
    int n_tx = 0;
    std::vector<double> a;        // |h^_n|, estimated RIS->receiver amplitudes
    std::vector<cdouble> h_unit;  // exp(j psi_n)
    std::vector<double> b;        // |g_{n,l}|, transmitter->RIS amplitudes
    std::vector<cdouble> g_unit;  // exp(j theta_{n,l})
    std::vector<cdouble> err;     // estimation-error samples Delta h_n ~ CN(0, sigma_e^2)

    std::size_t idx(int l, int n) const { return static_cast<std::size_t>(l) * n_elements + n; }
    double amp_b(int l, int n) const { return b[idx(l, n)]; }
    double psi(int n) const { return std::arg(h_unit[n]); }
    double theta_g(int l, int n) const { return std::arg(g_unit[idx(l, n)]); }

    /// Builds a realization from amplitudes and phases (row-major b, theta).
    static ChannelRealization from_polar(int n_tx, const std::vector<double>& a, const std::vector<double>& psi,
                                         const std::vector<double>& b, const std::vector<double>& theta,
                                         std::vector<cdouble> err = {});
};

/// RIS-aligned cascade gains for one active antenna.
struct CascadeGains {
    int n_tx = 0;
    int aligned = 0;                // antenna the RIS phases were set for
    std::vector<double> chi;        // chi_l = sum_n a_n b_{n,l}
    std::vector<cdouble> mismatch;  // (l, m) -> sum_n a_n b_{n,m} exp(j(theta_{n,l} - theta_{n,m}))

    cdouble at(int l, int m) const { return mismatch[static_cast<std::size_t>(l) * n_tx + m]; }
};

/// Draws a fresh realization. The overload taking `out` reuses its storage.
ChannelRealization sample_realization(const SystemParams& params, RandomStream& rng);
void sample_realization(const SystemParams& params, RandomStream& rng, ChannelRealization& out);

/// Sets the RIS phases phi_{n,l} = psi_n + theta_{n,l} for antenna `l`
/// (0-based) and returns the resulting cascade gains.
CascadeGains align_phases(const ChannelRealization& real, int l);
void align_phases(const ChannelRealization& real, int l, CascadeGains& out);

/// Like align_phases but only fills chi and mismatch row `l` (the detector's
/// hypothesis set); other rows are left zero.
void align_phases_row(const ChannelRealization& real, int l, CascadeGains& out);

/// Triangular density of the difference of two independent uniform phases on
/// (-pi, pi]; support (-2pi, 2pi).
double phase_diff_pdf(double z);

/// Draws chi = sum_n a_n b_n directly (N products of independent unit-power
/// Rayleigh amplitudes); same law as CascadeGains::chi[l].
double sample_aligned_gain(int n_elements, RandomStream& rng);

}  // namespace rissk
