#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "fracstrip/fft.hpp"
#include "fracstrip/time_grid.hpp"

namespace fracstrip {

/// Hurst index H in (0,1). Construction rejects anything else.
class HurstIndex {
public:
    explicit HurstIndex(double value);
    double value() const { return value_; }
    /// The cylindrical/SPDE theory needs H > 1/4.
    bool spde_admissible() const { return value_ > 0.25; }

private:
    double value_;
};

/// Covariance of fractional Brownian motion,
///   E[W_t W_s] = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2,  t,s >= 0.
double fbm_covariance(double t, double s, HurstIndex H);

struct FbmPath {
    TimeGrid grid;
    std::vector<double> values; // N+1 values, values[0] == 0
};

enum class FbmMethod {
    Auto,               // circulant embedding, dense Cholesky on failure
    CirculantEmbedding, // exact FFT sampler, O(N log N) per path
    Cholesky            // dense factor of the full path covariance, O(N^2) per path
};

/// Exact-in-distribution fBm sampler on a uniform grid. The embedding (or
/// Cholesky factor) is computed once at construction; sample() is then a pure
/// function of the seed and is safe to call concurrently.
class FbmSampler {
public:
    FbmSampler(HurstIndex H, TimeGrid grid, FbmMethod method = FbmMethod::Auto);

    const TimeGrid& grid() const { return grid_; }
    HurstIndex hurst() const { return hurst_; }
    FbmMethod method() const { return resolved_; }
    int clamped_eigenvalues() const { return clamped_; }

    FbmPath sample(std::uint64_t seed) const;

    /// Two independent paths from a single stream (one FFT; real and imaginary
    /// parts of a non-symmetrized synthesis). Circulant method only.
    std::pair<FbmPath, FbmPath> sample_pair(std::uint64_t seed) const;

private:
    void build_circulant();
    void build_cholesky();

    HurstIndex hurst_;
    TimeGrid grid_;
    FbmMethod resolved_;
    int clamped_ = 0;

    // circulant data
    std::shared_ptr<const Fft> fft_;
    std::vector<double> sym_scale_;  // sqrt(eig_k/(2M)), k = 0..M-1
    std::vector<double> pair_scale_; // sqrt(eig_k/M)

    // cholesky data (row-major lower triangle, N x N)
    std::vector<double> chol_;
};

/// One-shot convenience wrapper around FbmSampler (method Auto).
FbmPath sample_fbm(HurstIndex H, const TimeGrid& grid, std::uint64_t seed);

/// Cylindrical fBm on the unit torus, truncated at wavenumber K: independent
/// fBm paths indexed by the real trigonometric basis
///   index 0       -> constant mode,
///   index 2k-1    -> sqrt(2) cos(2 pi k x),
///   index 2k      -> sqrt(2) sin(2 pi k x),   1 <= k <= K.
/// Mode index m is drawn from the stream derive_seed(seed, m).
struct CylindricalFbmPath {
    int truncation = 0;
    std::vector<FbmPath> modes; // 2K+1 paths

    const FbmPath& constant_mode() const { return modes[0]; }
    const FbmPath& cos_mode(int k) const { return modes[2 * k - 1]; }
    const FbmPath& sin_mode(int k) const { return modes[2 * k]; }
};

class CylindricalFbmSampler {
public:
    CylindricalFbmSampler(HurstIndex H, int truncation, TimeGrid grid,
                          FbmMethod method = FbmMethod::Auto);

    int truncation() const { return truncation_; }
    const FbmSampler& mode_sampler() const { return sampler_; }

    CylindricalFbmPath sample(std::uint64_t seed) const;

    /// Reproduces a single mode in isolation from the master seed.
    FbmPath sample_mode(std::uint64_t seed, int mode_index) const;

private:
    int truncation_;
    FbmSampler sampler_;
};

CylindricalFbmPath sample_cylindrical_fbm(HurstIndex H, int truncation, const TimeGrid& grid,
                                          std::uint64_t seed);

} // namespace fracstrip
