#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracstrip/drift.hpp"
#include "fracstrip/fbm.hpp"
#include "fracstrip/stats.hpp"
#include "fracstrip/time_grid.hpp"

namespace fracstrip {

// Slow-fast SDE dynamics
//   dx_t = (1/eps) f(t, x_t) dt + (sigma/eps^H) dW^H_t
// near a stable uniformly hyperbolic equilibrium branch.

namespace detail {
/// Step-averaged kernel (e^z - 1)/z of the frozen exponential factor,
/// z = a*dt/eps (per SPDE mode: z = -lambda_k*dt/eps). Applied to every
/// noise increment: second-order accurate on resolved scales, damping on
/// unresolved ones, and shared verbatim by the SDE and SPDE steppers so the
/// zero mode of the SPDE matches the scalar scheme bitwise.
inline double noise_kernel(double z) {
    return (z > -1e-8 && z < 1e-8) ? 1.0 : std::expm1(z) / z;
}
} // namespace detail

/// Roots x*(t) of f(t, .) = 0 along the grid with a*(t) = df/dx(t, x*(t)).
struct EquilibriumBranch {
    TimeGrid grid;
    std::vector<double> x_star;
    std::vector<double> a_star;
    double a0 = 0.0; // uniform stability margin, a*(t) <= -a0 < 0
};

/// Continuation Newton solve: the root at each node seeds the next one.
/// Signals no-convergence (> max_iter Newton steps) or stability-violation
/// (a*(t) >= 0) as numerical errors.
EquilibriumBranch find_equilibrium_branch(const NonlinearDrift& drift, const TimeGrid& grid,
                                          double x0_guess, double newton_tol = 1e-12,
                                          int max_iter = 50);

/// The deterministic slow solution xbar of eps x' = f(t,x) from x(0) = x*(0),
/// with abar(t) = df/dx(t, xbar(t)) and abar0 = -max abar (= a0 - O(eps)).
struct SlowSolution {
    TimeGrid grid;
    std::vector<double> x_bar;
    std::vector<double> a_bar;
    double a_bar0 = 0.0;
    double eps = 0.0;

    /// Linear reference: xbar = 0 (the slow solution of eps x' = a(t) x),
    /// abar = a(t), abar0 = a0. Used for the linear exit experiments.
    static SlowSolution linear_reference(const LinearDrift& drift, const TimeGrid& grid);
};

/// L-stable SDIRK2 integration of the stiff deterministic equation; signals
/// left-basin if the solution drifts further than `d` from the branch.
SlowSolution slow_solution(const NonlinearDrift& drift, const EquilibriumBranch& branch,
                           double eps, int substeps = 32);

struct Trajectory {
    TimeGrid grid;
    std::vector<double> states;
    std::string scheme = "exponential-euler";
};

struct IntegrateOptions {
    double blowup_guard = 1e6;
};

/// Exponential-Euler step: f is linearized at the current state, the frozen
/// linear part is applied exactly over the step, and the fBm increment is
/// added scaled by sigma/eps^H. Exact for constant-coefficient linear drift.
Trajectory integrate_sde(const NonlinearDrift& drift, double eps, double sigma, HurstIndex H,
                         const FbmPath& noise, double x0, const IntegrateOptions& opts = {});
Trajectory integrate_sde(const LinearDrift& drift, double eps, double sigma, HurstIndex H,
                         const FbmPath& noise, double x0, const IntegrateOptions& opts = {});

/// First exit from the strip |x - xbar(t)| |abar(t)|^H <= h, evaluated on the
/// grid. h = 0 exits at t = 0 (the deviation starts at 0 >= 0).
struct ExitRecord {
    bool exited = false;
    std::optional<double> tau;
    double sup_scaled_deviation = 0.0;
};

ExitRecord exit_time(const Trajectory& traj, const SlowSolution& slow, HurstIndex H, double h);

/// A fixed (drift, eps, sigma, H, grid) exit experiment. Construction does
/// the one-time work (noise embedding, slow solution, strip weights); the
/// per-replica methods are pure in the replica seed and safe to run
/// concurrently. Replica i draws from derive_seed(seed, i).
class SdeExitExperiment {
public:
    static SdeExitExperiment linear(const LinearDrift& drift, double eps, double sigma,
                                    HurstIndex H, const TimeGrid& grid);
    static SdeExitExperiment nonlinear(const NonlinearDrift& drift, double eps, double sigma,
                                       HurstIndex H, const TimeGrid& grid, double x0_guess);

    const SlowSolution& slow() const { return slow_; }
    double x0() const { return x0_; }
    HurstIndex hurst() const { return hurst_; }
    double sigma() const { return sigma_; }
    double eps() const { return eps_; }

    /// sup_t |x_t - xbar(t)| |abar(t)|^H for one replica.
    double sup_deviation(std::uint64_t replica_seed) const;

    /// Per-replica sup deviations; common random numbers across h-thresholds.
    std::vector<double> sup_samples(long replicas, std::uint64_t seed, int threads = 0) const;

    /// One-sided variant sup_t (x_t - xbar(t)) |abar(t)|^H, used when
    /// calibrating the sup-tail constant against the one-sided theorem.
    std::vector<double> sup_samples_signed(long replicas, std::uint64_t seed,
                                           int threads = 0) const;

private:
    SdeExitExperiment(HurstIndex H, double eps, double sigma, const TimeGrid& grid);

    template <class Dev>
    double sup_impl(std::uint64_t replica_seed, Dev dev_of) const;

    HurstIndex hurst_;
    double eps_, sigma_, x0_ = 0.0;
    TimeGrid grid_;
    std::shared_ptr<const FbmSampler> sampler_;
    SlowSolution slow_{TimeGrid(1.0, 1), {}, {}, 0.0, 0.0};
    std::vector<double> weights_;    // |abar(t_j)|^H
    std::vector<double> decay_;      // linear case: e^{a(t_j) dt/eps}
    std::vector<double> noise_coef_; // linear case: noise_kernel * sigma/eps^H
    std::optional<NonlinearDrift> nonlinear_;
    double noise_scale_ = 0.0;
    IntegrateOptions opts_;
};

/// Wilson-interval exceedance frequency from cached sup samples.
McEstimate exit_probability_from_sups(std::span<const double> sups, double h,
                                      std::uint64_t seed, double level = 0.95);

/// Monte Carlo exit probability (>= 1000 replicas for CI sanity).
McEstimate exit_probability(const SdeExitExperiment& experiment, double h, long replicas,
                            std::uint64_t seed, double level = 0.95, int threads = 0);

} // namespace fracstrip
