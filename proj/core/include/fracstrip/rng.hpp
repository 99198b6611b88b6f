#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace fracstrip {

// Seed derivation (counter scheme)
// --------------------------------
// Every parallel unit of work (replica, noise mode, calibration run) draws
// from its own engine seeded by derive_seed(master, index). The scheme is a
// single splitmix64 mix of master XOR (index+1)*phi64, so any stream can be
// reconstructed in isolation from the master seed and its index. Nested
// streams chain the derivation: derive_seed(derive_seed(master, replica), mode).

inline constexpr std::uint64_t kSeedPhi64 = 0x9E3779B97F4A7C15ull;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += kSeedPhi64;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ ((stream + 1) * kSeedPhi64));
}

/// Deterministic stream of standard normal deviates (mt19937_64 + Marsaglia
/// polar). Identical seeds give identical sequences on a given build; the
/// distribution functions of the standard library are avoided since their
/// output is implementation-defined.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

    /// Uniform on (0,1), never exactly 0.
    double uniform();

    double normal();

    void fill_normal(std::span<double> out);

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace fracstrip
