#include "fracstrip/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracstrip/errors.hpp"
#include "fracstrip/parallel.hpp"
#include "fracstrip/rng.hpp"

namespace fracstrip {

namespace {

constexpr double kTwoPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

double angle_sq(int k) { return 1.0 + static_cast<double>(k) * k; } // <k>^2

} // namespace

SpectralField SpectralField::zero(int K) {
    if (K < 0) throw ValidationError("SpectralField: K must be >= 0");
    return SpectralField{K, std::vector<std::complex<double>>(static_cast<std::size_t>(K) + 1)};
}

SpectralField SpectralField::single_mode(int K, int k, std::complex<double> value) {
    SpectralField f = zero(K);
    if (k < 0 || k > K) throw ValidationError("SpectralField: mode index out of range");
    if (k == 0 && value.imag() != 0.0)
        throw ValidationError("SpectralField: mode 0 must be real");
    f.coeff[static_cast<std::size_t>(k)] = value;
    return f;
}

std::vector<double> field_values(const SpectralField& field, std::size_t M) {
    const std::size_t K = static_cast<std::size_t>(field.truncation);
    if (M < 2 * K + 2) throw ValidationError("field_values: collocation grid too small");
    Fft fft(M);
    std::vector<std::complex<double>> buf(M);
    buf[0] = field.coeff[0];
    for (std::size_t k = 1; k <= K; ++k) {
        buf[k] = field.coeff[k];
        buf[M - k] = std::conj(field.coeff[k]);
    }
    fft.backward(buf);
    std::vector<double> values(M);
    for (std::size_t j = 0; j < M; ++j) values[j] = buf[j].real();
    return values;
}

double eigenvalue(int k, const LinearDrift& drift, double t) {
    return kTwoPiSq * static_cast<double>(k) * k - drift(t);
}

double mode_rescaling(int k, double a0, double c) {
    if (!(a0 > 0.0 && c > 0.0)) throw ValidationError("mode_rescaling: a0, c must be > 0");
    return 1.0 / (a0 + c * static_cast<double>(k) * k);
}

double sobolev_norm(const SpectralField& field, double s) {
    if (s < 0.0) throw ValidationError("sobolev_norm: s must be >= 0");
    double acc = std::pow(angle_sq(0), s) * std::norm(field.coeff[0]);
    for (int k = 1; k <= field.truncation; ++k)
        acc += 2.0 * std::pow(angle_sq(k), s) * std::norm(field.coeff[static_cast<std::size_t>(k)]);
    return std::sqrt(acc);
}

SobolevWeighting::SobolevWeighting(double s_, HurstIndex H_, std::function<double(double)> a_bar_)
    : s(s_), H(H_), a_bar(std::move(a_bar_)) {
    if (!H.spde_admissible()) throw ValidationError("SobolevWeighting: requires H > 1/4");
    if (!(s > 0.0 && s < 2.0 * H.value() - 0.5))
        throw ValidationError("SobolevWeighting: s must lie in (0, 2H - 1/2)");
    if (!a_bar) throw ValidationError("SobolevWeighting: missing abar(t)");
}

double weighted_norm(const SpectralField& field, const SobolevWeighting& w, double t) {
    const double a = w.a_bar(t);
    const double hv = w.H.value();
    double acc = 0.0;
    for (int k = 0; k <= field.truncation; ++k) {
        const double lam = kTwoPiSq * static_cast<double>(k) * k - a;
        const double weight = std::pow(lam, hv) * std::pow(angle_sq(k), (w.s - 2.0 * hv) / 2.0);
        const double mult = k == 0 ? 1.0 : 2.0;
        acc += mult * weight * weight * std::norm(field.coeff[static_cast<std::size_t>(k)]);
    }
    return std::sqrt(acc);
}

PotentialDrift::PotentialDrift(std::vector<std::function<double(double)>> poly_coeffs,
                               double horizon, std::optional<Perturbation> g, double m_tilde,
                               double phi_box)
    : poly_(std::move(poly_coeffs)), g_(std::move(g)), horizon_(horizon), m_tilde_(m_tilde) {
    if (poly_.size() < 3 || poly_.size() % 2 == 0)
        throw ValidationError("PotentialDrift: polynomial degree must be even and >= 2");
    if (!(horizon > 0.0)) throw ValidationError("PotentialDrift: horizon must be > 0");
    for (const auto& c : poly_)
        if (!c) throw ValidationError("PotentialDrift: missing polynomial coefficient callable");
    if (g_ && !(m_tilde > 0.0))
        throw ValidationError("PotentialDrift: perturbation g requires M_tilde > 0");

    for (int i = 0; i <= 32; ++i) {
        const double t = horizon * i / 32.0;
        if (!(poly_.back()(t) > 0.0))
            throw ValidationError("PotentialDrift: leading coefficient a_{2p}(" +
                                  std::to_string(t) + ") must be > 0");
        if (g_) {
            if (std::abs(g_->g(t, 0.0)) > 1e-12)
                throw ValidationError("PotentialDrift: |g/phi| bounded requires g(t,0) = 0");
            for (int j = 1; j <= 16; ++j) {
                const double phi = -phi_box + 2.0 * phi_box * j / 16.0;
                if (std::abs(phi) < 1e-6) continue;
                const bool ok = std::abs(g_->g(t, phi) / phi) <= m_tilde &&
                                std::abs(g_->g_phi(t, phi)) <= m_tilde &&
                                std::abs(g_->g_phiphi(t, phi)) <= m_tilde &&
                                std::abs(g_->g_t(t, phi)) <= m_tilde;
                if (!ok)
                    throw ValidationError("PotentialDrift: g exceeds M_tilde at t=" +
                                          std::to_string(t) + ", phi=" + std::to_string(phi));
            }
        }
    }
}

double PotentialDrift::f(double t, double phi) const {
    // -P'(t,phi) by Horner on the derivative coefficients.
    double acc = 0.0;
    for (std::size_t j = poly_.size() - 1; j >= 1; --j) {
        acc = acc * phi + static_cast<double>(j) * poly_[j](t);
    }
    double value = -acc;
    if (g_) value -= g_->g_phi(t, phi);
    return value;
}

double PotentialDrift::df_dphi(double t, double phi) const {
    double acc = 0.0;
    for (std::size_t j = poly_.size() - 1; j >= 2; --j)
        acc = acc * phi + static_cast<double>(j) * static_cast<double>(j - 1) * poly_[j](t);
    double value = -acc;
    if (g_) value -= g_->g_phiphi(t, phi);
    return value;
}

NonlinearDrift PotentialDrift::scalar_drift(double M, double d) const {
    return NonlinearDrift([this](double t, double x) { return f(t, x); },
                          [this](double t, double x) { return df_dphi(t, x); }, M, d, horizon_);
}

PotentialDrift PotentialDrift::cubic(double amp, double omega, double horizon) {
    std::vector<std::function<double(double)>> coeffs(5);
    coeffs[0] = [](double) { return 0.0; };
    coeffs[1] = [amp, omega](double t) { return -amp * std::sin(omega * t); };
    coeffs[2] = [](double) { return -0.5; };
    coeffs[3] = [](double) { return 0.0; };
    coeffs[4] = [](double) { return 0.25; };
    return PotentialDrift(std::move(coeffs), horizon);
}

namespace {

std::size_t auto_collocation(int degree, int K) {
    const std::size_t needed = std::max<std::size_t>(static_cast<std::size_t>(degree) * K + 1,
                                                     2 * static_cast<std::size_t>(K) + 2);
    return next_pow2(needed);
}

struct Workspace {
    std::vector<std::complex<double>> buf;
    std::vector<double> values;
    std::vector<std::complex<double>> rhat;
};

/// One pseudo-spectral evaluation of the ETD remainder
/// R(u) = f(t,u) - abar*u, truncated back to |k| <= K.
void etd_remainder(const PotentialDrift& drift, const Fft& fft, double t, double abar,
                   std::span<const std::complex<double>> state, Workspace& ws) {
    const std::size_t M = fft.size();
    const std::size_t K = state.size() - 1;
    ws.buf.assign(M, {});
    ws.buf[0] = state[0];
    for (std::size_t k = 1; k <= K; ++k) {
        ws.buf[k] = state[k];
        ws.buf[M - k] = std::conj(state[k]);
    }
    fft.backward(ws.buf);
    ws.values.resize(M);
    for (std::size_t j = 0; j < M; ++j) {
        const double u = ws.buf[j].real();
        ws.values[j] = drift.f(t, u) - abar * u;
    }
    for (std::size_t j = 0; j < M; ++j) ws.buf[j] = ws.values[j];
    fft.forward(ws.buf);
    ws.rhat.resize(K + 1);
    const double inv_m = 1.0 / static_cast<double>(M);
    for (std::size_t k = 0; k <= K; ++k) ws.rhat[k] = ws.buf[k] * inv_m;
}

/// Applies the nonlinear deterministic exponential-Euler step in place and
/// records each mode's step-averaged noise kernel for the subsequent noise
/// injection (gamma may be null for deterministic runs).
void nonlinear_step(const PotentialDrift& drift, const Fft& fft, double t, double dt, double eps,
                    std::span<const double> heat, std::span<std::complex<double>> state,
                    Workspace& ws, std::vector<double>* gamma) {
    const double abar = drift.df_dphi(t, state[0].real());
    etd_remainder(drift, fft, t, abar, state, ws);
    const double ea = std::exp(abar * dt / eps);
    const std::size_t K = state.size() - 1;
    if (gamma) gamma->resize(K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
        const double lam = kTwoPiSq * static_cast<double>(k) * k - abar;
        const double decay = heat[k] * ea;
        const double coeff = std::abs(lam) * dt / eps > 1e-8 ? (1.0 - decay) / lam : dt / eps;
        state[k] = decay * state[k] + coeff * ws.rhat[k];
        if (gamma) (*gamma)[k] = detail::noise_kernel(-lam * dt / eps);
    }
}

double l2_norm(std::span<const std::complex<double>> state) {
    double acc = std::norm(state[0]);
    for (std::size_t k = 1; k < state.size(); ++k) acc += 2.0 * std::norm(state[k]);
    return std::sqrt(acc);
}

/// coef[k] = noise_kernel * sigma/eps^H per mode.
void add_noise(std::span<std::complex<double>> state, const CylindricalFbmPath& noise,
               std::size_t j, std::span<const double> coef) {
    const std::size_t K = state.size() - 1;
    state[0] += coef[0] * (noise.modes[0].values[j + 1] - noise.modes[0].values[j]);
    constexpr double inv_sqrt2 = 0.7071067811865475244;
    for (std::size_t k = 1; k <= K; ++k) {
        const double dc = noise.modes[2 * k - 1].values[j + 1] - noise.modes[2 * k - 1].values[j];
        const double ds = noise.modes[2 * k].values[j + 1] - noise.modes[2 * k].values[j];
        state[k] += coef[k] * std::complex<double>(dc * inv_sqrt2, -ds * inv_sqrt2);
    }
}

void check_noise_compatible(const CylindricalFbmPath& noise, const SpectralField& init,
                            const TimeGrid& grid) {
    if (noise.truncation != init.truncation)
        throw ValidationError("integrate_spde: noise truncation does not match field truncation");
    if (!(noise.modes.at(0).grid == grid))
        throw ValidationError("integrate_spde: noise grid does not match requested grid");
}

} // namespace

std::vector<SpectralField> integrate_spde(const LinearDrift& drift, double eps, double sigma,
                                          HurstIndex H, const CylindricalFbmPath& noise,
                                          const SpectralField& init,
                                          const SpdeIntegratorOptions& opts) {
    const TimeGrid grid = noise.modes.at(0).grid;
    check_noise_compatible(noise, init, grid);
    const int K = init.truncation;
    const double dt = grid.dt();
    const double scale = sigma / std::pow(eps, H.value());

    std::vector<SpectralField> out;
    out.reserve(grid.nodes());
    out.push_back(init);
    std::vector<std::complex<double>> state = init.coeff;
    std::vector<double> coef(static_cast<std::size_t>(K) + 1);
    for (std::size_t j = 0; j + 1 < grid.nodes(); ++j) {
        const double a_t = drift(grid.node(j));
        for (int k = 0; k <= K; ++k) {
            const double lam = kTwoPiSq * static_cast<double>(k) * k - a_t;
            const double z = -lam * dt / eps;
            state[static_cast<std::size_t>(k)] *= std::exp(z);
            coef[static_cast<std::size_t>(k)] = detail::noise_kernel(z) * scale;
        }
        add_noise(state, noise, j, coef);
        if (!(l2_norm(state) <= opts.blowup_guard))
            throw NumericalError("integrate_spde: L2 blow-up at t=" +
                                 std::to_string(grid.node(j + 1)));
        out.push_back(SpectralField{K, state});
    }
    return out;
}

std::vector<SpectralField> integrate_spde(const PotentialDrift& drift, double eps, double sigma,
                                          HurstIndex H, const CylindricalFbmPath& noise,
                                          const SpectralField& init,
                                          const SpdeIntegratorOptions& opts) {
    const TimeGrid grid = noise.modes.at(0).grid;
    check_noise_compatible(noise, init, grid);
    const int K = init.truncation;
    const double dt = grid.dt();
    const double scale = sigma / std::pow(eps, H.value());
    const std::size_t M =
        opts.collocation ? opts.collocation : auto_collocation(drift.degree(), K);
    const Fft fft(M);
    std::vector<double> heat(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k)
        heat[static_cast<std::size_t>(k)] =
            std::exp(-kTwoPiSq * static_cast<double>(k) * k * dt / eps);

    std::vector<SpectralField> out;
    out.reserve(grid.nodes());
    out.push_back(init);
    std::vector<std::complex<double>> state = init.coeff;
    Workspace ws;
    std::vector<double> gamma, coef(static_cast<std::size_t>(K) + 1);
    for (std::size_t j = 0; j + 1 < grid.nodes(); ++j) {
        nonlinear_step(drift, fft, grid.node(j), dt, eps, heat, state, ws, &gamma);
        for (std::size_t k = 0; k < coef.size(); ++k) coef[k] = gamma[k] * scale;
        add_noise(state, noise, j, coef);
        if (!(l2_norm(state) <= opts.blowup_guard))
            throw NumericalError("integrate_spde: L2 blow-up at t=" +
                                 std::to_string(grid.node(j + 1)));
        out.push_back(SpectralField{K, state});
    }
    return out;
}

SpdeSlowSolution spde_slow_solution(const PotentialDrift& drift, double eps, int K,
                                    const TimeGrid& grid, double x0_guess, double branch_m,
                                    double branch_d, int substeps) {
    if (substeps < 1) throw ValidationError("spde_slow_solution: substeps must be >= 1");
    const NonlinearDrift scalar = drift.scalar_drift(branch_m, branch_d);
    const EquilibriumBranch branch = find_equilibrium_branch(scalar, grid, x0_guess);

    const std::size_t M = auto_collocation(drift.degree(), K);
    const Fft fft(M);
    const double dt = grid.dt() / substeps;
    std::vector<double> heat(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k)
        heat[static_cast<std::size_t>(k)] =
            std::exp(-kTwoPiSq * static_cast<double>(k) * k * dt / eps);

    SpdeSlowSolution slow{grid, {}, {}, 0.0, eps};
    slow.fields.reserve(grid.nodes());
    slow.a_bar.reserve(grid.nodes());

    std::vector<std::complex<double>> state(static_cast<std::size_t>(K) + 1);
    state[0] = branch.x_star.front();
    Workspace ws;
    double max_a = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.nodes(); ++j) {
        if (j > 0) {
            const double t0 = grid.node(j - 1);
            for (int s = 0; s < substeps; ++s)
                nonlinear_step(drift, fft, t0 + s * dt, dt, eps, heat, state, ws, nullptr);
        }
        const double mean = state[0].real();
        if (std::abs(mean - branch.x_star[j]) > branch_d)
            throw NumericalError("spde_slow_solution: left the branch basin at t=" +
                                 std::to_string(grid.node(j)));
        const double a = drift.df_dphi(grid.node(j), mean);
        slow.fields.push_back(SpectralField{K, state});
        slow.a_bar.push_back(a);
        max_a = std::max(max_a, a);
    }
    slow.a_bar0 = -max_a;
    if (!(slow.a_bar0 > 0.0))
        throw NumericalError("spde_slow_solution: abar reaches 0; not uniformly stable");
    return slow;
}

std::vector<double> schauder_ratio(const SpectralField& field, double q, double r,
                                   std::span<const double> times) {
    const double norm_r = sobolev_norm(field, r);
    if (norm_r == 0.0) throw ValidationError("schauder_ratio: ||field||_{H^r} is zero");
    std::vector<double> rho;
    rho.reserve(times.size());
    for (double t : times) {
        if (!(t > 0.0)) throw ValidationError("schauder_ratio: times must be > 0");
        double acc = 0.0;
        for (int k = 0; k <= field.truncation; ++k) {
            const double damp = std::exp(-2.0 * kTwoPiSq * static_cast<double>(k) * k * t);
            const double mult = k == 0 ? 1.0 : 2.0;
            acc += mult * std::pow(angle_sq(k), q) * damp *
                   std::norm(field.coeff[static_cast<std::size_t>(k)]);
        }
        rho.push_back(std::sqrt(acc) * std::pow(t, (q - r) / 2.0) / norm_r);
    }
    return rho;
}

SpdeExitExperiment::SpdeExitExperiment(double eps, double sigma, HurstIndex H, int K,
                                       const TimeGrid& grid, double s)
    : eps_(eps), sigma_(sigma), s_(s), hurst_(H), truncation_(K), grid_(grid) {
    if (!(eps > 0.0)) throw ValidationError("SpdeExitExperiment: eps must be > 0");
    if (!(sigma >= 0.0)) throw ValidationError("SpdeExitExperiment: sigma must be >= 0");
    if (!H.spde_admissible()) throw ValidationError("SpdeExitExperiment: requires H > 1/4");
    if (!(s > 0.0 && s < 2.0 * H.value() - 0.5))
        throw ValidationError("SpdeExitExperiment: s must lie in (0, 2H - 1/2)");
    sampler_ = std::make_shared<CylindricalFbmSampler>(H, K, grid);
    noise_scale_ = sigma / std::pow(eps, H.value());
}

void SpdeExitExperiment::finish_setup(const std::function<double(double)>& a_bar_of_t) {
    const std::size_t K = static_cast<std::size_t>(truncation_);
    const double hv = hurst_.value();
    a_bar_.resize(grid_.nodes());
    for (std::size_t j = 0; j < grid_.nodes(); ++j) a_bar_[j] = a_bar_of_t(grid_.node(j));
    a_bar0_ = -*std::max_element(a_bar_.begin(), a_bar_.end());

    wsq_.resize(grid_.nodes() * (K + 1));
    for (std::size_t j = 0; j < grid_.nodes(); ++j) {
        for (std::size_t k = 0; k <= K; ++k) {
            const double lam = kTwoPiSq * static_cast<double>(k) * k - a_bar_[j];
            const double w = std::pow(lam, hv) *
                             std::pow(angle_sq(static_cast<int>(k)), (s_ - 2.0 * hv) / 2.0);
            wsq_[j * (K + 1) + k] = (k == 0 ? 1.0 : 2.0) * w * w;
        }
    }
    psq_.resize(K + 1);
    for (std::size_t k = 0; k <= K; ++k)
        psq_[k] = (k == 0 ? 1.0 : 2.0) * std::pow(angle_sq(static_cast<int>(k)), s_);
}

SpdeExitExperiment SpdeExitExperiment::linear(const LinearDrift& drift, double eps, double sigma,
                                              HurstIndex H, int K, const TimeGrid& grid,
                                              double s) {
    SpdeExitExperiment ex(eps, sigma, H, K, grid, s);
    const std::size_t nk = static_cast<std::size_t>(K) + 1;
    ex.decay_.resize(grid.steps() * nk);
    ex.ncoef_.resize(grid.steps() * nk);
    for (std::size_t j = 0; j < grid.steps(); ++j) {
        const double a_t = drift(grid.node(j));
        for (std::size_t k = 0; k < nk; ++k) {
            const double lam = kTwoPiSq * static_cast<double>(k) * k - a_t;
            const double z = -lam * grid.dt() / eps;
            ex.decay_[j * nk + k] = std::exp(z);
            ex.ncoef_[j * nk + k] = detail::noise_kernel(z) * ex.noise_scale_;
        }
    }
    ex.x_bar_.assign(grid.nodes(), 0.0);
    ex.finish_setup([&drift](double t) { return drift(t); });
    return ex;
}

SpdeExitExperiment SpdeExitExperiment::nonlinear(const PotentialDrift& drift, double eps,
                                                 double sigma, HurstIndex H, int K,
                                                 const TimeGrid& grid, double s, double x0_guess,
                                                 double branch_m, double branch_d) {
    SpdeExitExperiment ex(eps, sigma, H, K, grid, s);
    ex.nonlinear_ = drift;
    const SpdeSlowSolution slow =
        spde_slow_solution(drift, eps, K, grid, x0_guess, branch_m, branch_d);
    ex.x_bar_.resize(grid.nodes());
    for (std::size_t j = 0; j < grid.nodes(); ++j) ex.x_bar_[j] = slow.fields[j].mean();
    const std::size_t nk = static_cast<std::size_t>(K) + 1;
    ex.heat_.resize(nk);
    for (std::size_t k = 0; k < nk; ++k)
        ex.heat_[k] = std::exp(-kTwoPiSq * static_cast<double>(k) * k * grid.dt() / eps);
    ex.collocation_ = std::make_shared<Fft>(auto_collocation(drift.degree(), K));
    std::vector<double> abar = slow.a_bar;
    ex.finish_setup([&grid, &abar](double t) {
        // nearest-node lookup of the recorded linearization
        const double pos = t / grid.horizon() * static_cast<double>(grid.steps());
        const std::size_t j = std::min<std::size_t>(
            grid.steps(), static_cast<std::size_t>(std::llround(pos)));
        return abar[j];
    });
    return ex;
}

void SpdeExitExperiment::run_one(std::uint64_t replica_seed, double& sup_weighted,
                                 double& sup_plain) const {
    const CylindricalFbmPath noise = sampler_->sample(replica_seed);
    const std::size_t K = static_cast<std::size_t>(truncation_);
    const std::size_t nk = K + 1;
    std::vector<std::complex<double>> state(nk);
    state[0] = x_bar_[0];

    Workspace ws;
    std::vector<double> gamma, coef(nk);
    sup_weighted = 0.0;
    sup_plain = 0.0;
    for (std::size_t j = 0; j + 1 < grid_.nodes(); ++j) {
        if (nonlinear_) {
            nonlinear_step(*nonlinear_, *collocation_, grid_.node(j), grid_.dt(), eps_, heat_,
                           state, ws, &gamma);
            for (std::size_t k = 0; k < nk; ++k) coef[k] = gamma[k] * noise_scale_;
            add_noise(state, noise, j, coef);
        } else {
            const double* row = &decay_[j * nk];
            for (std::size_t k = 0; k < nk; ++k) state[k] *= row[k];
            add_noise(state, noise, j, std::span<const double>(&ncoef_[j * nk], nk));
        }
        if (!(l2_norm(state) <= blowup_guard_))
            throw NumericalError("SpdeExitExperiment: L2 blow-up");

        // Deviation from the (spatially constant) reference solution.
        const std::size_t node = j + 1;
        const double psi0 = state[0].real() - x_bar_[node];
        const double* wrow = &wsq_[node * nk];
        double acc_w = wrow[0] * psi0 * psi0;
        double acc_p = psq_[0] * psi0 * psi0;
        for (std::size_t k = 1; k < nk; ++k) {
            const double nk2 = std::norm(state[k]);
            acc_w += wrow[k] * nk2;
            acc_p += psq_[k] * nk2;
        }
        sup_weighted = std::max(sup_weighted, std::sqrt(acc_w));
        sup_plain = std::max(sup_plain, std::sqrt(acc_p));
    }
}

SpdeExitExperiment::SupSamples SpdeExitExperiment::sup_samples(long replicas, std::uint64_t seed,
                                                               int threads) const {
    SupSamples out;
    out.weighted.resize(static_cast<std::size_t>(replicas));
    out.plain.resize(static_cast<std::size_t>(replicas));
    parallel_for(replicas, threads, [&](long i) {
        run_one(derive_seed(seed, static_cast<std::uint64_t>(i)),
                out.weighted[static_cast<std::size_t>(i)], out.plain[static_cast<std::size_t>(i)]);
    });
    return out;
}

McEstimate spde_exit_probability(const SpdeExitExperiment& experiment, double h, long replicas,
                                 std::uint64_t seed, double level, int threads) {
    if (replicas < 1000)
        throw ValidationError("spde_exit_probability: need at least 1000 replicas for CI sanity");
    const auto sups = experiment.sup_samples(replicas, seed, threads);
    return exit_probability_from_sups(sups.weighted, h, seed, level);
}

} // namespace fracstrip
