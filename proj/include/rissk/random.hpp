#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/random/normal_distribution.hpp>

namespace rissk {

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent sub-seed for stream `stream` of a run seeded with `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t sm = master ^ (stream * 0x9e3779b97f4a7c15ULL);
    splitmix64(sm);
    return splitmix64(sm);
}

/// xoshiro256** stream. Streams for individual Monte Carlo trials are derived
/// from (master_seed, trial_index) so results do not depend on how trials are
/// partitioned across workers.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& s : state_) s = splitmix64(sm);
    }

    static RandomStream for_trial(std::uint64_t master_seed, std::uint64_t trial_index) {
        std::uint64_t sm = master_seed;
        const std::uint64_t a = splitmix64(sm);
        std::uint64_t mix = a ^ (trial_index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL);
        return RandomStream(splitmix64(mix));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on (0, 1], never exactly zero.
    double uniform_open0() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

    /// Uniform phase on (-pi, pi].
    double phase() { return std::numbers::pi * (2.0 * uniform_open0() - 1.0); }

    /// Standard normal sample (ziggurat).
    double normal() { return boost::random::normal_distribution<double>{}(*this); }

    /// CN(0, variance) sample.
    std::complex<double> complex_normal(double variance) {
        if (variance == 0.0) return {0.0, 0.0};
        const double s = std::sqrt(0.5 * variance);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    /// Magnitude of a CN(0, 1) sample: Rayleigh with E[r^2] = 1.
    double rayleigh() {
        const double x = normal();
        const double y = normal();
        return std::sqrt(0.5 * (x * x + y * y));
    }

    /// Uniform integer in [0, n).
    int index(int n) {
        return static_cast<int>((((*this)() >> 32) * static_cast<std::uint64_t>(n)) >> 32);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace rissk
