#pragma once

#include <cstdint>
#include <span>

#include "fracstrip/drift.hpp"
#include "fracstrip/fbm.hpp"
#include "fracstrip/quadrature.hpp"
#include "fracstrip/stats.hpp"

namespace fracstrip {

// Variance analysis of the non-autonomous fractional Ornstein-Uhlenbeck
// process
//   dx_t = (1/eps) a(t) x_t dt + (sigma/eps^H) dW^H_t,   x_0 = 0.

/// alpha(t,u) = \int_u^t a(s) ds, evaluated from the drift's precomputed
/// antiderivative. Requires 0 <= u <= t <= horizon.
double alpha(const LinearDrift& drift, double t, double u);

/// Upper bound on Var(x_t):
///   (2 H sigma^2 / eps^{2H}) * \int_0^t [ e^{alpha(t,s)/eps} (t-s)^{2H-1}
///       - e^{alpha(t)/eps} (1 - e^{alpha(t,s)/eps}) s^{2H-1} ] ds.
/// The endpoint singularities for H < 1/2 and the O(eps) boundary layer at
/// s = t are handled by a graded mesh (or adaptive refinement, per spec).
double variance_bound_quadrature(const LinearDrift& drift, HurstIndex H, double sigma,
                                 double eps, double t, const QuadratureSpec& spec = {});

/// Exact variance via the covariance double integral:
///   (sigma^2/eps^{2H}) [ t^{2H} + 2 \int_0^t (a(s)/eps) e^{alpha(t,s)/eps} Cov(t,s) ds
///     + \int\int (a(u) a(v)/eps^2) e^{alpha(t,u)/eps} e^{alpha(t,v)/eps} Cov(u,v) du dv ].
/// The separable parts of Cov reduce to single integrals; the |u-v|^{2H}
/// kernel is integrated over one triangle (and doubled) with the diagonal
/// kink and the boundary layers resolved by graded meshes.
double variance_exact_double_integral(const LinearDrift& drift, HurstIndex H, double sigma,
                                      double eps, double t, const QuadratureSpec& spec = {});

/// Asymptotic bound sigma^2 * 2H Gamma(2H) / |a(t)|^{2H} * (1 + r1*eps).
double variance_asymptotic(const LinearDrift& drift, HurstIndex H, double sigma, double eps,
                           double t, double r1);

struct McVarianceOptions {
    long steps_per_eps = 128; // time step dt = eps / steps_per_eps (power-of-two padded)
    long min_steps = 512;
    double level = 0.99;
    int threads = 0;
};

/// Sample variance of x_t over independent exponential-Euler integrations,
/// with a jackknife confidence interval. Replica i draws its fBm path from
/// the stream derive_seed(seed, i).
McEstimate mc_variance(const LinearDrift& drift, HurstIndex H, double sigma, double eps,
                       double t, long replicas, std::uint64_t seed,
                       const McVarianceOptions& opts = {});

/// Smallest r1 >= 0 for which the asymptotic bound dominates the integral
/// bound on the given (t, eps) grid:
///   r1 = max over the grid of ( V_integral * |a(t)|^{2H} / (sigma^2 2H Gamma(2H)) - 1 ) / eps.
double calibrate_r1(const LinearDrift& drift, HurstIndex H, std::span<const double> t_grid,
                    std::span<const double> eps_grid, const QuadratureSpec& spec = {});

} // namespace fracstrip
