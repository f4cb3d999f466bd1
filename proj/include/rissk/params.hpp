#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace rissk {

struct PerfectCsi {};

/// Estimation-error variance held constant across SNR.
struct FixedError {
    double variance = 0.0;
};

/// Estimation-error variance 1/(rho*T) for T pilot symbols.
struct VariableError {
    int pilots = 1;
};

using EstimationErrorMode = std::variant<PerfectCsi, FixedError, VariableError>;

std::string describe(const EstimationErrorMode& mode);

/// Scalar knobs of the two-way link, seen from the U_A receiver. The U_B side
/// is the same computation with its own parameters substituted.
///
/// Powers are normalized so that P_A = P_B = rho * noise_power and
/// N_A = N_B = noise_power.
struct SystemParams {
    int n_elements = 64;     // RIS elements N
    int n_tx = 2;            // transmit antennas N_t (power of two)
    double snr_db = 0.0;     // rho in dB
    double li_level = 0.0;   // residual loop-interference level k^2
    EstimationErrorMode err_mode = PerfectCsi{};
    double noise_power = 1.0;

    double rho() const;
    double p_tx() const { return rho() * noise_power; }

    /// sigma_e^2 at the current SNR (0 for perfect CSI).
    double error_variance() const;
    /// xi^2 = 1/(1 + sigma_e^2).
    double xi_squared() const;
    double xi() const;

    int bits_per_symbol() const;

    /// Throws ConfigError if any field is out of range.
    void validate() const;

    SystemParams with_snr_db(double db) const {
        SystemParams p = *this;
        p.snr_db = db;
        return p;
    }
};

double db_to_linear(double db);

/// Number of differing bits between natural-binary labels of two antenna indices.
int hamming_distance(int l, int m);

}  // namespace rissk
