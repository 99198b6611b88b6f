#include "fracstrip/slowfast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracstrip/errors.hpp"
#include "fracstrip/parallel.hpp"
#include "fracstrip/rng.hpp"

namespace fracstrip {

namespace {

double newton_root(const NonlinearDrift& drift, double t, double guess, double tol,
                   int max_iter) {
    double x = guess;
    for (int it = 0; it < max_iter; ++it) {
        const double fx = drift.value(t, x);
        if (std::abs(fx) < tol) return x;
        const double dfx = drift.slope(t, x);
        if (dfx == 0.0)
            throw NumericalError("find_equilibrium_branch: vanishing derivative at t=" +
                                 std::to_string(t));
        x -= fx / dfx;
    }
    if (std::abs(drift.value(t, x)) < tol) return x;
    throw NumericalError("find_equilibrium_branch: Newton did not converge at t=" +
                         std::to_string(t));
}

} // namespace

EquilibriumBranch find_equilibrium_branch(const NonlinearDrift& drift, const TimeGrid& grid,
                                          double x0_guess, double newton_tol, int max_iter) {
    EquilibriumBranch branch{grid, {}, {}, 0.0};
    branch.x_star.reserve(grid.nodes());
    branch.a_star.reserve(grid.nodes());
    double guess = x0_guess;
    double max_a = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.nodes(); ++j) {
        const double t = grid.node(j);
        const double x = newton_root(drift, t, guess, newton_tol, max_iter);
        const double a = drift.slope(t, x);
        if (a >= 0.0)
            throw NumericalError("find_equilibrium_branch: stability violation, a*(t) = " +
                                 std::to_string(a) + " >= 0 at t=" + std::to_string(t));
        branch.x_star.push_back(x);
        branch.a_star.push_back(a);
        max_a = std::max(max_a, a);
        guess = x;
    }
    branch.a0 = -max_a;
    return branch;
}

SlowSolution SlowSolution::linear_reference(const LinearDrift& drift, const TimeGrid& grid) {
    SlowSolution slow{grid, std::vector<double>(grid.nodes(), 0.0),
                      std::vector<double>(grid.nodes(), 0.0), drift.a0(), 0.0};
    for (std::size_t j = 0; j < grid.nodes(); ++j) slow.a_bar[j] = drift(grid.node(j));
    return slow;
}

namespace {

// One L-stable SDIRK2 step (Alexander's two-stage method, stiffly accurate).
double sdirk2_step(const NonlinearDrift& drift, double eps, double t, double dt, double x) {
    constexpr double gamma = 0.2928932188134524756; // 1 - sqrt(2)/2
    auto solve_stage = [&](double ts, double rhs, double guess) {
        double y = guess;
        for (int it = 0; it < 64; ++it) {
            const double g = y - gamma * (dt / eps) * drift.value(ts, y) - rhs;
            const double dg = 1.0 - gamma * (dt / eps) * drift.slope(ts, y);
            const double step = g / dg;
            y -= step;
            if (std::abs(step) < 1e-14 * (1.0 + std::abs(y))) return y;
        }
        throw NumericalError("slow_solution: implicit stage did not converge at t=" +
                             std::to_string(ts));
    };
    const double t1 = t + gamma * dt;
    const double y1 = solve_stage(t1, x, x);
    const double f1 = drift.value(t1, y1);
    const double rhs2 = x + (1.0 - gamma) * (dt / eps) * f1;
    return solve_stage(t + dt, rhs2, y1);
}

} // namespace

SlowSolution slow_solution(const NonlinearDrift& drift, const EquilibriumBranch& branch,
                           double eps, int substeps) {
    if (!(eps > 0.0)) throw ValidationError("slow_solution: eps must be > 0");
    if (substeps < 1) throw ValidationError("slow_solution: substeps must be >= 1");
    const TimeGrid& grid = branch.grid;
    SlowSolution slow{grid, {}, {}, 0.0, eps};
    slow.x_bar.reserve(grid.nodes());
    slow.a_bar.reserve(grid.nodes());

    double x = branch.x_star.front();
    double max_a = -std::numeric_limits<double>::infinity();
    const double d = drift.remainder_d();
    for (std::size_t j = 0; j < grid.nodes(); ++j) {
        if (j > 0) {
            const double t0 = grid.node(j - 1);
            const double dt = (grid.node(j) - t0) / substeps;
            for (int s = 0; s < substeps; ++s) x = sdirk2_step(drift, eps, t0 + s * dt, dt, x);
        }
        if (std::abs(x - branch.x_star[j]) > d)
            throw NumericalError("slow_solution: left the branch basin at t=" +
                                 std::to_string(grid.node(j)) + " (|xbar - x*| > d)");
        const double a = drift.slope(grid.node(j), x);
        slow.x_bar.push_back(x);
        slow.a_bar.push_back(a);
        max_a = std::max(max_a, a);
    }
    slow.a_bar0 = -max_a;
    if (!(slow.a_bar0 > 0.0))
        throw NumericalError("slow_solution: abar(t) reaches 0; slow solution not uniformly stable");
    return slow;
}

namespace {

using detail::noise_kernel;

/// step(t, x) returns {deterministic update, z = a dt/eps of the frozen part}.
template <class Step>
Trajectory integrate_impl(const TimeGrid& grid, const FbmPath& noise, double x0,
                          double noise_scale, double guard, Step&& step) {
    if (!(noise.grid == grid))
        throw ValidationError("integrate_sde: noise grid does not match trajectory grid");
    Trajectory traj{grid, std::vector<double>(grid.nodes(), 0.0)};
    double x = x0;
    traj.states[0] = x;
    for (std::size_t j = 0; j + 1 < grid.nodes(); ++j) {
        const auto [det, z] = step(grid.node(j), x);
        const double coef = noise_kernel(z) * noise_scale;
        x = det + coef * (noise.values[j + 1] - noise.values[j]);
        if (!(std::abs(x) <= guard))
            throw NumericalError("integrate_sde: trajectory blow-up at t=" +
                                 std::to_string(grid.node(j + 1)));
        traj.states[j + 1] = x;
    }
    return traj;
}

} // namespace

Trajectory integrate_sde(const NonlinearDrift& drift, double eps, double sigma, HurstIndex H,
                         const FbmPath& noise, double x0, const IntegrateOptions& opts) {
    const double dt = noise.grid.dt();
    const double noise_scale = sigma / std::pow(eps, H.value());
    return integrate_impl(noise.grid, noise, x0, noise_scale, opts.blowup_guard,
                          [&](double t, double x) {
                              const double a = drift.slope(t, x);
                              const double f = drift.value(t, x);
                              const double z = a * dt / eps;
                              const double det =
                                  std::abs(z) > 1e-8 ? x + std::expm1(z) * f / a : x + dt / eps * f;
                              return std::pair<double, double>(det, z);
                          });
}

Trajectory integrate_sde(const LinearDrift& drift, double eps, double sigma, HurstIndex H,
                         const FbmPath& noise, double x0, const IntegrateOptions& opts) {
    const double dt = noise.grid.dt();
    const double noise_scale = sigma / std::pow(eps, H.value());
    return integrate_impl(noise.grid, noise, x0, noise_scale, opts.blowup_guard,
                          [&](double t, double x) {
                              const double z = drift(t) * dt / eps;
                              return std::pair<double, double>(std::exp(z) * x, z);
                          });
}

ExitRecord exit_time(const Trajectory& traj, const SlowSolution& slow, HurstIndex H, double h) {
    if (!(traj.grid == slow.grid))
        throw ValidationError("exit_time: trajectory and slow solution grids differ");
    if (h < 0.0) throw ValidationError("exit_time: h must be >= 0");
    ExitRecord rec;
    for (std::size_t j = 0; j < traj.states.size(); ++j) {
        const double dev =
            std::abs(traj.states[j] - slow.x_bar[j]) * std::pow(std::abs(slow.a_bar[j]), H.value());
        rec.sup_scaled_deviation = std::max(rec.sup_scaled_deviation, dev);
        if (!rec.exited && dev >= h) {
            rec.exited = true;
            rec.tau = traj.grid.node(j);
        }
    }
    return rec;
}

SdeExitExperiment::SdeExitExperiment(HurstIndex H, double eps, double sigma, const TimeGrid& grid)
    : hurst_(H), eps_(eps), sigma_(sigma), grid_(grid) {
    if (!(eps > 0.0)) throw ValidationError("SdeExitExperiment: eps must be > 0");
    if (!(sigma >= 0.0)) throw ValidationError("SdeExitExperiment: sigma must be >= 0");
    sampler_ = std::make_shared<FbmSampler>(H, grid);
    noise_scale_ = sigma / std::pow(eps, H.value());
}

SdeExitExperiment SdeExitExperiment::linear(const LinearDrift& drift, double eps, double sigma,
                                            HurstIndex H, const TimeGrid& grid) {
    SdeExitExperiment ex(H, eps, sigma, grid);
    ex.slow_ = SlowSolution::linear_reference(drift, grid);
    ex.x0_ = 0.0;
    ex.decay_.resize(grid.steps());
    ex.noise_coef_.resize(grid.steps());
    for (std::size_t j = 0; j < grid.steps(); ++j) {
        const double z = drift(grid.node(j)) * grid.dt() / eps;
        ex.decay_[j] = std::exp(z);
        ex.noise_coef_[j] = noise_kernel(z) * ex.noise_scale_;
    }
    ex.weights_.resize(grid.nodes());
    for (std::size_t j = 0; j < grid.nodes(); ++j)
        ex.weights_[j] = std::pow(std::abs(ex.slow_.a_bar[j]), H.value());
    return ex;
}

SdeExitExperiment SdeExitExperiment::nonlinear(const NonlinearDrift& drift, double eps,
                                               double sigma, HurstIndex H, const TimeGrid& grid,
                                               double x0_guess) {
    SdeExitExperiment ex(H, eps, sigma, grid);
    const EquilibriumBranch branch = find_equilibrium_branch(drift, grid, x0_guess);
    ex.slow_ = slow_solution(drift, branch, eps);
    ex.x0_ = ex.slow_.x_bar.front();
    ex.nonlinear_ = drift;
    ex.weights_.resize(grid.nodes());
    for (std::size_t j = 0; j < grid.nodes(); ++j)
        ex.weights_[j] = std::pow(std::abs(ex.slow_.a_bar[j]), H.value());
    return ex;
}

namespace {
struct AbsDeviation {
    double operator()(double diff, double weight) const { return std::abs(diff) * weight; }
};
struct SignedDeviation {
    double operator()(double diff, double weight) const { return diff * weight; }
};
} // namespace

template <class Dev>
double SdeExitExperiment::sup_impl(std::uint64_t replica_seed, Dev dev_of) const {
    const FbmPath path = sampler_->sample(replica_seed);
    const double dt = grid_.dt();
    const double guard = opts_.blowup_guard;
    double x = x0_;
    double sup = -std::numeric_limits<double>::infinity();
    if (nonlinear_) {
        const NonlinearDrift& drift = *nonlinear_;
        for (std::size_t j = 0; j + 1 < grid_.nodes(); ++j) {
            const double t = grid_.node(j);
            const double a = drift.slope(t, x);
            const double f = drift.value(t, x);
            const double z = a * dt / eps_;
            const double det = std::abs(z) > 1e-8 ? x + std::expm1(z) * f / a : x + dt / eps_ * f;
            x = det + noise_kernel(z) * noise_scale_ * (path.values[j + 1] - path.values[j]);
            if (!(std::abs(x) <= guard))
                throw NumericalError("SdeExitExperiment: trajectory blow-up");
            sup = std::max(sup, dev_of(x - slow_.x_bar[j + 1], weights_[j + 1]));
        }
    } else {
        for (std::size_t j = 0; j + 1 < grid_.nodes(); ++j) {
            x = decay_[j] * x + noise_coef_[j] * (path.values[j + 1] - path.values[j]);
            if (!(std::abs(x) <= guard))
                throw NumericalError("SdeExitExperiment: trajectory blow-up");
            sup = std::max(sup, dev_of(x, weights_[j + 1]));
        }
    }
    return std::max(sup, dev_of(0.0, weights_[0])); // node 0: x = xbar(0)
}

double SdeExitExperiment::sup_deviation(std::uint64_t replica_seed) const {
    return sup_impl(replica_seed, AbsDeviation{});
}

std::vector<double> SdeExitExperiment::sup_samples(long replicas, std::uint64_t seed,
                                                   int threads) const {
    std::vector<double> sups(static_cast<std::size_t>(replicas));
    parallel_for(replicas, threads, [&](long i) {
        sups[static_cast<std::size_t>(i)] =
            sup_impl(derive_seed(seed, static_cast<std::uint64_t>(i)), AbsDeviation{});
    });
    return sups;
}

std::vector<double> SdeExitExperiment::sup_samples_signed(long replicas, std::uint64_t seed,
                                                          int threads) const {
    std::vector<double> sups(static_cast<std::size_t>(replicas));
    parallel_for(replicas, threads, [&](long i) {
        sups[static_cast<std::size_t>(i)] =
            sup_impl(derive_seed(seed, static_cast<std::uint64_t>(i)), SignedDeviation{});
    });
    return sups;
}

McEstimate exit_probability_from_sups(std::span<const double> sups, double h,
                                      std::uint64_t seed, double level) {
    if (sups.empty()) throw ValidationError("exit_probability_from_sups: empty sample");
    long hits = 0;
    for (double s : sups)
        if (s >= h) ++hits;
    McEstimate est = wilson_interval(hits, static_cast<long>(sups.size()), level);
    est.seed = seed;
    return est;
}

McEstimate exit_probability(const SdeExitExperiment& experiment, double h, long replicas,
                            std::uint64_t seed, double level, int threads) {
    if (replicas < 1000)
        throw ValidationError("exit_probability: need at least 1000 replicas for CI sanity");
    const std::vector<double> sups = experiment.sup_samples(replicas, seed, threads);
    return exit_probability_from_sups(sups, h, seed, level);
}

} // namespace fracstrip
