#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fracstrip/drift.hpp"
#include "fracstrip/fbm.hpp"
#include "fracstrip/fft.hpp"
#include "fracstrip/slowfast.hpp"
#include "fracstrip/stats.hpp"

namespace fracstrip {

// Spectral Galerkin machinery for the SPDE
//   d phi = (1/eps)[ Laplacian phi + f(t, phi) ] dt + (sigma/eps^H) dW^H(t,x)
// on the unit torus, truncated at wavenumber K.

/// Truncated Fourier coefficients of a real field,
///   u(x) = c[0] + sum_{k=1}^K 2 Re( c[k] e^{2 pi i k x} ).
/// Negative modes are implicit conjugates, so the reality constraint is
/// structural rather than enforced.
struct SpectralField {
    int truncation = 0;
    std::vector<std::complex<double>> coeff; // k = 0..K, coeff[0] real

    static SpectralField zero(int K);
    static SpectralField single_mode(int K, int k, std::complex<double> value);

    double mean() const { return coeff[0].real(); }
};

/// Collocation values of the field on j/M, j = 0..M-1 (M a power of two).
std::vector<double> field_values(const SpectralField& field, std::size_t M);

/// k-th eigenvalue of -Laplacian - a(t): (2 pi k)^2 - a(t) >= (2 pi k)^2 + a0.
double eigenvalue(int k, const LinearDrift& drift, double t);

/// Time-rescaling weight mu_k = (a0 + c k^2)^{-1}; with c = (2 pi)^2 the
/// rescaled eigenvalue mu_k * lambda_k is >= 1 uniformly.
double mode_rescaling(int k, double a0, double c);

/// Fractional Sobolev norm ( sum <k>^{2s} |phi_k|^2 )^{1/2}, <k> = sqrt(1+k^2).
double sobolev_norm(const SpectralField& field, double s);

/// Time-dependent weights a_{k,s}(t) = lambda_k(t)^H <k>^{s-2H} built from the
/// linearization abar(t) along the reference solution.
struct SobolevWeighting {
    double s;
    HurstIndex H;
    std::function<double(double)> a_bar; // t -> abar(t) (linear case: a(t))

    SobolevWeighting(double s_, HurstIndex H_, std::function<double(double)> a_bar_);
};

double weighted_norm(const SpectralField& field, const SobolevWeighting& w, double t);

/// Reaction term f(t,phi) = -d/dphi U(t,phi), U = P + g: P polynomial of even
/// degree 2p with a_{2p}(t) > 0, g smooth and bounded with constant M_tilde.
class PotentialDrift {
public:
    struct Perturbation {
        std::function<double(double, double)> g;      // g(t, phi)
        std::function<double(double, double)> g_phi;  // d/dphi
        std::function<double(double, double)> g_phiphi;
        std::function<double(double, double)> g_t;    // d/dt
    };

    PotentialDrift(std::vector<std::function<double(double)>> poly_coeffs, double horizon,
                   std::optional<Perturbation> g = std::nullopt, double m_tilde = 0.0,
                   double phi_box = 2.0);

    double f(double t, double phi) const;       // -P'(t,phi) - g_phi(t,phi)
    double df_dphi(double t, double phi) const; // -P''(t,phi) - g_phiphi(t,phi)
    int degree() const { return static_cast<int>(poly_.size()) - 1; } // 2p
    double horizon() const { return horizon_; }
    double m_tilde() const { return m_tilde_; }

    /// Scalar view of the reaction for branch/slow-solution machinery;
    /// (M, d) are the quadratic-remainder constants near the branch.
    NonlinearDrift scalar_drift(double M, double d) const;

    /// U = phi^4/4 - phi^2/2 - amp*sin(omega t)*phi; f = phi - phi^3 + amp*sin(omega t).
    static PotentialDrift cubic(double amp, double omega, double horizon);

private:
    std::vector<std::function<double(double)>> poly_; // a_j(t), j = 0..2p
    std::optional<Perturbation> g_;
    double horizon_, m_tilde_;
};

struct SpdeIntegratorOptions {
    std::size_t collocation = 0; // 0 = auto: next_pow2(max(2p*K+1, 2K+2))
    double blowup_guard = 1e6;   // on the L2 norm
};

/// Linear Galerkin step: each mode is damped by the exact exponential of the
/// frozen eigenvalue, then receives its noise increment.
std::vector<SpectralField> integrate_spde(const LinearDrift& drift, double eps, double sigma,
                                          HurstIndex H, const CylindricalFbmPath& noise,
                                          const SpectralField& init,
                                          const SpdeIntegratorOptions& opts = {});

/// Nonlinear Galerkin step (exponential Euler): f is linearized at the
/// current spatial mean, the frozen linear part (Laplacian + slope) is
/// applied exactly, and the pseudo-spectral remainder (collocation grid of
/// >= 2p*K+1 points, truncation back to |k| <= K) enters through the ETD
/// coefficient. Reduces to the scalar scheme on spatially constant states.
std::vector<SpectralField> integrate_spde(const PotentialDrift& drift, double eps, double sigma,
                                          HurstIndex H, const CylindricalFbmPath& noise,
                                          const SpectralField& init,
                                          const SpdeIntegratorOptions& opts = {});

/// Deterministic slow solution of the SPDE from the spatially constant stable
/// branch, integrated by the Galerkin scheme with sigma = 0.
struct SpdeSlowSolution {
    TimeGrid grid;
    std::vector<SpectralField> fields;
    std::vector<double> a_bar; // d/dphi f(t_j, phibar(t_j)) at the spatial mean
    double a_bar0 = 0.0;
    double eps = 0.0;
};

SpdeSlowSolution spde_slow_solution(const PotentialDrift& drift, double eps, int K,
                                    const TimeGrid& grid, double x0_guess, double branch_m,
                                    double branch_d, int substeps = 8);

/// Heat-semigroup smoothing ratio rho(t) = ||e^{t Lap} f||_{H^q} t^{(q-r)/2}
/// / ||f||_{H^r}, evaluated spectrally at the given times.
std::vector<double> schauder_ratio(const SpectralField& field, double q, double r,
                                   std::span<const double> times);

/// Exit experiment for the SPDE strip: per-replica supremum over the grid of
/// the weighted-norm deviation from the reference solution (and of the plain
/// H^s deviation, reported for comparison).
class SpdeExitExperiment {
public:
    static SpdeExitExperiment linear(const LinearDrift& drift, double eps, double sigma,
                                     HurstIndex H, int K, const TimeGrid& grid, double s);
    static SpdeExitExperiment nonlinear(const PotentialDrift& drift, double eps, double sigma,
                                        HurstIndex H, int K, const TimeGrid& grid, double s,
                                        double x0_guess, double branch_m, double branch_d);

    struct SupSamples {
        std::vector<double> weighted; // sup_t ||phi - phibar||_{s,t}
        std::vector<double> plain;    // sup_t ||phi - phibar||_{H^s}
    };

    SupSamples sup_samples(long replicas, std::uint64_t seed, int threads = 0) const;
    double a_bar0() const { return a_bar0_; }
    const std::vector<double>& x_bar() const { return x_bar_; }

private:
    SpdeExitExperiment(double eps, double sigma, HurstIndex H, int K, const TimeGrid& grid,
                       double s);
    void finish_setup(const std::function<double(double)>& a_bar_of_t);
    void run_one(std::uint64_t replica_seed, double& sup_weighted, double& sup_plain) const;

    double eps_, sigma_, s_;
    HurstIndex hurst_;
    int truncation_;
    TimeGrid grid_;
    std::shared_ptr<const CylindricalFbmSampler> sampler_;
    std::shared_ptr<const Fft> collocation_;
    double noise_scale_ = 0.0;
    double blowup_guard_ = 1e6;

    // linear: full decay/noise tables; nonlinear: heat factors + drift
    std::vector<double> decay_;  // [step * (K+1) + k], linear only
    std::vector<double> ncoef_;  // [step * (K+1) + k] noise_kernel * sigma/eps^H
    std::vector<double> heat_;   // e^{-(2 pi k)^2 dt / eps}, nonlinear only
    std::optional<PotentialDrift> nonlinear_;

    std::vector<double> x_bar_;  // spatial mean of the reference solution per node
    std::vector<double> a_bar_;  // linearization per node
    double a_bar0_ = 0.0;
    std::vector<double> wsq_;    // [node * (K+1) + k] weighted-norm squared weights
    std::vector<double> psq_;    // plain H^s squared weights (node-independent)
};

/// Monte Carlo probability that the weighted-norm deviation reaches h before
/// the horizon (grid supremum), with a Wilson interval.
McEstimate spde_exit_probability(const SpdeExitExperiment& experiment, double h, long replicas,
                                 std::uint64_t seed, double level = 0.95, int threads = 0);

} // namespace fracstrip
