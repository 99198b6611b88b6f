#include "fracstrip/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fracstrip/bounds.hpp"
#include "fracstrip/errors.hpp"
#include "fracstrip/fou_variance.hpp"
#include "fracstrip/rng.hpp"
#include "fracstrip/slowfast.hpp"
#include "fracstrip/spectral.hpp"

namespace fracstrip {

namespace {

LinearDrift make_linear_drift(const DriftSpec& spec, double horizon) {
    if (spec.tag == "const") return LinearDrift::constant(-spec.base, horizon);
    if (spec.tag == "sin")
        return LinearDrift::sinusoid(spec.base, spec.amp, spec.omega, horizon);
    throw ValidationError("drift '" + spec.tag + "' is not linear");
}

NonlinearDrift make_cubic_drift(const DriftSpec& spec, double horizon) {
    const double amp = spec.amp, omega = spec.omega;
    return NonlinearDrift(
        [amp, omega](double t, double x) { return x - x * x * x + amp * std::sin(omega * t); },
        [](double, double x) { return 1.0 - 3.0 * x * x; }, spec.m_const, spec.d_const, horizon);
}

std::string fmt(double v) { return format_cell(v); }

double resolve_r1(const ExperimentConfig& cfg, const LinearDrift& drift,
                  const QuadratureSpec& spec) {
    if (cfg.r1 >= 0.0) return cfg.r1;
    std::vector<double> ts;
    for (int i = 1; i <= 8; ++i) ts.push_back(cfg.T * i / 8.0);
    const std::vector<double> eps{cfg.eps};
    return calibrate_r1(drift, HurstIndex(cfg.H), ts, eps, spec);
}

double read_k0_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("k0_file: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError("k0_file: '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.contains("calibrated") || !j["calibrated"].contains("k0"))
        throw ValidationError("k0_file: '" + path + "' carries no calibrated.k0 entry");
    return j["calibrated"]["k0"].get<double>();
}

double resolve_k0(const ExperimentConfig& cfg) {
    return cfg.k0_file.empty() ? cfg.k0 : read_k0_file(cfg.k0_file);
}

/// Empirical Schauder constant: c(q,r) from a sup-rho scan of a reference
/// H^r field, turned into c'(q,r) = c * T^{1-(q-r)/2} / (1-(q-r)/2)
/// (the worst-case t = T value of the convolution integral).
double estimate_cprime(double q, double r, double T, int K, std::uint64_t seed) {
    SpectralField f = SpectralField::zero(K);
    GaussianStream rng(seed);
    f.coeff[0] = rng.normal();
    for (int k = 1; k <= K; ++k) {
        const double scale = std::pow(1.0 + static_cast<double>(k) * k, (-r - 0.51) / 2.0);
        f.coeff[k] = {scale * rng.normal(), scale * rng.normal()};
    }
    std::vector<double> times;
    for (int i = 0; i <= 48; ++i) times.push_back(1e-6 * std::pow(1.0 / 1e-6, i / 48.0));
    const auto rho = schauder_ratio(f, q, r, times);
    double c = 0.0;
    for (double v : rho) c = std::max(c, v);
    const double nu = 1.0 - (q - r) / 2.0;
    return c * std::pow(T, nu) / nu;
}

std::string plot_header(const std::string& kind, const std::string& title) {
    std::ostringstream out;
    out << "# fracstrip plot description v1\n";
    out << "plot " << kind << "\n";
    out << "title " << title << "\n";
    return out.str();
}

RunReport run_variance(const ExperimentConfig& cfg) {
    RunReport report;
    report.columns = {"t",          "mc_var",        "ci_lo",         "ci_hi",
                      "exact_quad", "lemma31_bound", "lemma32_bound", "chain_ok", "seed"};
    const LinearDrift drift = make_linear_drift(cfg.drift, cfg.T);
    const HurstIndex h(cfg.H);
    QuadratureSpec spec;
    spec.abs_tol = cfg.quad_tol;
    const double r1 = resolve_r1(cfg, drift, spec);
    report.calibrated["r1"] = r1;

    McVarianceOptions mc_opts;
    mc_opts.level = cfg.ci_level;
    mc_opts.threads = cfg.threads;
    for (int i = 1; i <= cfg.t_points; ++i) {
        const double t = cfg.T * i / cfg.t_points;
        const std::uint64_t row_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
        const McEstimate mc =
            mc_variance(drift, h, cfg.sigma, cfg.eps, t, cfg.replicas, row_seed, mc_opts);
        const double exact = variance_exact_double_integral(drift, h, cfg.sigma, cfg.eps, t, spec);
        const double v31 = variance_bound_quadrature(drift, h, cfg.sigma, cfg.eps, t, spec);
        const double v32 = variance_asymptotic(drift, h, cfg.sigma, cfg.eps, t, r1);
        const bool chain = mc.estimate <= exact + (mc.ci_high - mc.estimate) + cfg.quad_tol &&
                           exact <= v31 + 2.0 * cfg.quad_tol && v31 <= v32 + 2.0 * cfg.quad_tol;
        report.rows.push_back({fmt(t), fmt(mc.estimate), fmt(mc.ci_low), fmt(mc.ci_high),
                               fmt(exact), fmt(v31), fmt(v32), chain ? "1" : "0",
                               std::to_string(row_seed)});
    }
    report.plot_description =
        plot_header("variance", "fOU variance: Monte Carlo vs quadrature and bounds") +
        "x t\ny variance\n"
        "series mc_var from results.csv x=t y=mc_var lo=ci_lo hi=ci_hi style=points\n"
        "curve exact_quad from results.csv x=t y=exact_quad style=line\n"
        "curve lemma31_bound from results.csv x=t y=lemma31_bound style=line\n"
        "curve lemma32_bound from results.csv x=t y=lemma32_bound style=line\n";
    return report;
}

RunReport run_sde_exit(const ExperimentConfig& cfg) {
    RunReport report;
    report.columns = {"row",   "h",           "p_hat",           "ci_lo", "ci_hi",
                      "bound_linear", "bound_nonlinear", "slope", "slope_target", "seed"};
    const HurstIndex h(cfg.H);
    const TimeGrid grid(cfg.T, static_cast<std::size_t>(cfg.N));
    QuadratureSpec spec;
    spec.abs_tol = cfg.quad_tol;

    BoundParams params;
    params.k0 = resolve_k0(cfg);
    double a0_eff = 0.0;
    double m_eff = 0.0;
    std::vector<double> sups;
    if (cfg.drift.linear()) {
        const LinearDrift drift = make_linear_drift(cfg.drift, cfg.T);
        const auto ex = SdeExitExperiment::linear(drift, cfg.eps, cfg.sigma, h, grid);
        sups = ex.sup_samples(cfg.replicas, cfg.seed, cfg.threads);
        a0_eff = drift.a0();
        const double r1 = resolve_r1(cfg, drift, spec);
        report.calibrated["r1"] = r1;
        params.r2 = cfg.r2 >= 0.0 ? cfg.r2 : r1;
    } else {
        const NonlinearDrift drift = make_cubic_drift(cfg.drift, cfg.T);
        const auto ex =
            SdeExitExperiment::nonlinear(drift, cfg.eps, cfg.sigma, h, grid, cfg.drift.x0_guess);
        sups = ex.sup_samples(cfg.replicas, cfg.seed, cfg.threads);
        a0_eff = ex.slow().a_bar0;
        m_eff = cfg.nl_m >= 0.0 ? cfg.nl_m : cfg.drift.m_const;
        const LinearDrift frozen = LinearDrift::constant(-a0_eff, cfg.T);
        const double r1 = resolve_r1(cfg, frozen, spec);
        report.calibrated["r1"] = r1;
        params.r2 = cfg.r2 >= 0.0 ? cfg.r2 : r1;
    }
    report.calibrated["k0"] = params.k0;
    report.calibrated["r2"] = params.r2;
    report.calibrated["a0_eff"] = a0_eff;

    std::vector<double> fit_x, fit_y;
    for (std::size_t i = 0; i < cfg.h_over_sigma.size(); ++i) {
        const double m = cfg.h_over_sigma[i];
        const double hh = m * cfg.sigma;
        const McEstimate p = exit_probability_from_sups(sups, hh, cfg.seed, cfg.ci_level);
        const double bound_lin =
            sde_bound(cfg.T, hh, cfg.sigma, a0_eff, cfg.eps, h, params).value;
        std::string bound_nl_cell;
        try {
            bound_nl_cell =
                fmt(sde_bound_nonlinear(cfg.T, hh, cfg.sigma, a0_eff, cfg.eps, h, m_eff, params)
                        .value);
        } catch (const ValidationError&) {
            bound_nl_cell = ""; // h too large for the nonlinear split
        }
        if (p.estimate > 0.0 && m >= cfg.fit_lo && m <= cfg.fit_hi) {
            fit_x.push_back(m * m / 2.0);
            fit_y.push_back(-std::log(p.estimate));
        }
        report.rows.push_back({"point", fmt(hh), fmt(p.estimate), fmt(p.ci_low), fmt(p.ci_high),
                               fmt(bound_lin), bound_nl_cell, "", "", std::to_string(cfg.seed)});
    }
    const double kappa0 = kappa(0.0, h, 0.0);
    if (fit_x.size() >= 2) {
        const LineFit fit = fit_line(fit_x, fit_y);
        report.calibrated["slope"] = fit.slope;
        report.rows.push_back({"slope_fit", "", "", "", "", "", "", fmt(fit.slope), fmt(kappa0),
                               std::to_string(cfg.seed)});
    } else {
        report.rows.push_back(
            {"slope_fit", "", "", "", "", "", "", "", fmt(kappa0), std::to_string(cfg.seed)});
    }
    report.plot_description =
        plot_header("sde-exit", "SDE exit probability vs threshold, with bounds") +
        "x h\ny probability log\nfilter row == point\n"
        "series p_hat from results.csv x=h y=p_hat lo=ci_lo hi=ci_hi style=points\n"
        "curve bound_linear from results.csv x=h y=bound_linear style=line\n"
        "curve bound_nonlinear from results.csv x=h y=bound_nonlinear style=line\n";
    return report;
}

RunReport run_spde_exit(const ExperimentConfig& cfg) {
    RunReport report;
    report.columns = {"h",            "p_hat",           "ci_lo", "ci_hi", "p_hat_hs",
                      "bound_linear", "bound_nonlinear", "seed"};
    const HurstIndex h(cfg.H);
    const TimeGrid grid(cfg.T, static_cast<std::size_t>(cfg.N));
    QuadratureSpec spec;
    spec.abs_tol = cfg.quad_tol;

    BoundParams params;
    params.k0 = resolve_k0(cfg);
    params.eta = cfg.eta;

    double a0_eff = 0.0, m_eff = 0.0, cprime = 0.0, q_exp = cfg.s, r_exp = cfg.s;
    SpdeExitExperiment::SupSamples sups;
    if (cfg.drift.linear()) {
        const LinearDrift drift = make_linear_drift(cfg.drift, cfg.T);
        const auto ex =
            SpdeExitExperiment::linear(drift, cfg.eps, cfg.sigma, h, cfg.K, grid, cfg.s);
        sups = ex.sup_samples(cfg.replicas, cfg.seed, cfg.threads);
        a0_eff = drift.a0();
        const double r1 = resolve_r1(cfg, drift, spec);
        report.calibrated["r1"] = r1;
        params.r2 = cfg.r2 >= 0.0 ? cfg.r2 : r1;
    } else {
        const PotentialDrift drift = PotentialDrift::cubic(cfg.drift.amp, cfg.drift.omega, cfg.T);
        const auto ex = SpdeExitExperiment::nonlinear(drift, cfg.eps, cfg.sigma, h, cfg.K, grid,
                                                      cfg.s, cfg.drift.x0_guess,
                                                      cfg.drift.m_const, cfg.drift.d_const);
        sups = ex.sup_samples(cfg.replicas, cfg.seed, cfg.threads);
        a0_eff = ex.a_bar0();
        m_eff = cfg.nl_m >= 0.0 ? cfg.nl_m : cfg.drift.m_const;
        if (cfg.q_exp >= 0.0) q_exp = cfg.q_exp;
        if (cfg.r_exp >= 0.0) r_exp = cfg.r_exp;
        cprime = cfg.cprime > 0.0 ? cfg.cprime
                                  : estimate_cprime(q_exp, r_exp, cfg.T, 2048,
                                                    derive_seed(cfg.seed, 0x5eed));
        report.calibrated["cprime"] = cprime;
        const LinearDrift frozen = LinearDrift::constant(-a0_eff, cfg.T);
        const double r1 = resolve_r1(cfg, frozen, spec);
        report.calibrated["r1"] = r1;
        params.r2 = cfg.r2 >= 0.0 ? cfg.r2 : r1;
    }
    report.calibrated["k0"] = params.k0;
    report.calibrated["r2"] = params.r2;
    report.calibrated["a0_eff"] = a0_eff;
    report.calibrated["Q"] = q_of_s(h, cfg.s, params.eta > 0.0 ? params.eta : default_eta(h, cfg.s));

    for (double m : cfg.h_over_sigma) {
        const double hh = m * cfg.sigma;
        const McEstimate p = exit_probability_from_sups(sups.weighted, hh, cfg.seed, cfg.ci_level);
        const McEstimate p_hs = exit_probability_from_sups(sups.plain, hh, cfg.seed, cfg.ci_level);
        const double bound_lin =
            spde_bound(cfg.T, hh, cfg.sigma, cfg.s, a0_eff, cfg.eps, h, params).value;
        std::string bound_nl_cell;
        if (m_eff > 0.0) {
            try {
                bound_nl_cell = fmt(spde_bound_nonlinear(cfg.T, hh, cfg.sigma, cfg.s, a0_eff,
                                                         cfg.eps, h, m_eff, cprime, q_exp, r_exp,
                                                         params)
                                        .value);
            } catch (const ValidationError&) {
                bound_nl_cell = "";
            }
        }
        report.rows.push_back({fmt(hh), fmt(p.estimate), fmt(p.ci_low), fmt(p.ci_high),
                               fmt(p_hs.estimate), fmt(bound_lin), bound_nl_cell,
                               std::to_string(cfg.seed)});
    }
    report.plot_description =
        plot_header("spde-exit", "SPDE exit probability in the weighted Sobolev strip") +
        "x h\ny probability log\n"
        "series p_hat from results.csv x=h y=p_hat lo=ci_lo hi=ci_hi style=points\n"
        "series p_hat_hs from results.csv x=h y=p_hat_hs style=points\n"
        "curve bound_linear from results.csv x=h y=bound_linear style=line\n"
        "curve bound_nonlinear from results.csv x=h y=bound_nonlinear style=line\n";
    return report;
}

RunReport run_schauder(const ExperimentConfig& cfg) {
    RunReport report;
    report.columns = {"q", "r", "fitted_slope", "target_slope", "sup_rho", "cprime", "seed"};
    std::vector<double> fit_times;
    for (int i = 0; i <= 12; ++i) fit_times.push_back(1e-7 * std::pow(3e-6 / 1e-7, i / 12.0));
    std::vector<double> sup_times;
    for (int i = 0; i <= 32; ++i) sup_times.push_back(1e-4 * std::pow(1.0 / 1e-4, i / 32.0));

    for (std::size_t pair = 0; pair < cfg.schauder_r.size(); ++pair) {
        const double r = cfg.schauder_r[pair];
        const double q = r + cfg.schauder_dq[pair];
        std::vector<double> mean_log(fit_times.size(), 0.0);
        double sup_rho = 0.0;
        for (int rep = 0; rep < cfg.schauder_fields; ++rep) {
            SpectralField f = SpectralField::zero(cfg.schauder_K);
            GaussianStream rng(derive_seed(cfg.seed, pair * 1000 + rep));
            f.coeff[0] = rng.normal();
            for (int k = 1; k <= cfg.schauder_K; ++k) {
                const double scale =
                    std::pow(1.0 + static_cast<double>(k) * k, (-r - 0.51) / 2.0);
                f.coeff[k] = {scale * rng.normal(), scale * rng.normal()};
            }
            const auto rho_fit = schauder_ratio(f, q, r, fit_times);
            for (std::size_t i = 0; i < fit_times.size(); ++i)
                mean_log[i] += std::log(rho_fit[i] * std::pow(fit_times[i], -(q - r) / 2.0)) /
                               cfg.schauder_fields;
            const auto rho_sup = schauder_ratio(f, q, r, sup_times);
            for (double v : rho_sup) sup_rho = std::max(sup_rho, v);
        }
        std::vector<double> logt;
        for (double t : fit_times) logt.push_back(std::log(t));
        const LineFit fit = fit_line(logt, mean_log);
        const double nu = 1.0 - (q - r) / 2.0;
        const double cprime = sup_rho * std::pow(cfg.T, nu) / nu;
        report.rows.push_back({fmt(q), fmt(r), fmt(fit.slope), fmt(-(q - r) / 2.0), fmt(sup_rho),
                               fmt(cprime), std::to_string(cfg.seed)});
    }
    report.plot_description =
        plot_header("schauder", "Heat-semigroup smoothing exponent check") +
        "x q\ny slope\n"
        "series fitted_slope from results.csv x=q y=fitted_slope style=points\n"
        "curve target_slope from results.csv x=q y=target_slope style=line\n";
    return report;
}

RunReport run_calibrate_k0(const ExperimentConfig& cfg) {
    RunReport report;
    report.columns = {"threshold", "p_hat", "ci_lo", "ci_hi", "bound_at_k0", "seed"};
    if (cfg.drift.tag != "const")
        throw ValidationError("calibrate-k0: the stationary reference requires drift = const");
    const HurstIndex h(cfg.H);
    const LinearDrift drift = make_linear_drift(cfg.drift, cfg.T);
    const TimeGrid grid(cfg.T, static_cast<std::size_t>(cfg.N));
    QuadratureSpec spec;
    spec.abs_tol = cfg.quad_tol;
    const double r1 = resolve_r1(cfg, drift, spec);

    const double two_h = 2.0 * cfg.H;
    const double a0 = drift.a0();
    const double g_const = cfg.sigma * cfg.sigma / std::pow(cfg.eps, two_h);
    const double var_sup = variance_asymptotic(drift, h, cfg.sigma, cfg.eps, cfg.T, r1);
    const double weight = std::pow(a0, cfg.H);

    const auto ex = SdeExitExperiment::linear(drift, cfg.eps, cfg.sigma, h, grid);
    std::vector<double> sups = ex.sup_samples_signed(cfg.replicas, cfg.seed, cfg.threads);
    for (double& v : sups) v /= weight; // back to the unweighted process x_t

    // Smallest K0 on the geometric grid with bound(K0, c_i) >= p_hat_i.
    double k0_exact = 0.0;
    struct Row {
        double c;
        McEstimate p;
    };
    std::vector<Row> rows;
    for (double m : cfg.thresholds) {
        const double c = m * std::sqrt(var_sup);
        const McEstimate p = exit_probability_from_sups(sups, c, cfg.seed, cfg.ci_level);
        rows.push_back({c, p});
        if (p.estimate > 0.0) {
            const double unit = gaussian_sup_tail(1.0, two_h, g_const, cfg.T, c, var_sup);
            k0_exact = std::max(k0_exact, p.estimate / unit);
        }
    }
    bool any_hit = false;
    for (const Row& r : rows) any_hit = any_hit || r.p.estimate > 0.0;
    if (!any_hit)
        throw NumericalError("calibrate-k0: insufficient replicas, no exceedances observed at "
                             "any threshold");
    const double k0 =
        std::pow(cfg.k0_grid_ratio,
                 std::ceil(std::log(k0_exact) / std::log(cfg.k0_grid_ratio) - 1e-12));
    report.calibrated["k0"] = k0;
    report.calibrated["k0_exact"] = k0_exact;
    report.calibrated["r1"] = r1;
    report.calibrated["var_sup"] = var_sup;
    report.calibrated["G"] = g_const;
    report.calibrated["gamma"] = two_h;

    for (const Row& r : rows) {
        const double bound = gaussian_sup_tail(k0, two_h, g_const, cfg.T, r.c, var_sup);
        report.rows.push_back({fmt(r.c), fmt(r.p.estimate), fmt(r.p.ci_low), fmt(r.p.ci_high),
                               fmt(bound), std::to_string(cfg.seed)});
    }
    report.plot_description =
        plot_header("calibrate-k0", "Sup-tail bound vs exceedance frequencies at calibrated K0") +
        "x threshold\ny probability log\n"
        "series p_hat from results.csv x=threshold y=p_hat lo=ci_lo hi=ci_hi style=points\n"
        "curve bound_at_k0 from results.csv x=threshold y=bound_at_k0 style=line\n";
    return report;
}

RunReport run_slope_fit(const ExperimentConfig& cfg) {
    RunReport report;
    report.columns = {"H", "slope", "kappa0", "ratio_to_kappa0", "points_used", "seed"};
    const HurstIndex h(cfg.H);
    const LinearDrift drift = make_linear_drift(cfg.drift, cfg.T);
    const TimeGrid grid(cfg.T, static_cast<std::size_t>(cfg.N));
    const auto ex = SdeExitExperiment::linear(drift, cfg.eps, cfg.sigma, h, grid);
    const std::vector<double> sups = ex.sup_samples(cfg.replicas, cfg.seed, cfg.threads);

    std::vector<double> xs, ys;
    for (double m : cfg.h_over_sigma) {
        if (m < cfg.fit_lo || m > cfg.fit_hi) continue;
        const McEstimate p = exit_probability_from_sups(sups, m * cfg.sigma, cfg.seed);
        if (p.estimate > 0.0) {
            xs.push_back(m * m / 2.0);
            ys.push_back(-std::log(p.estimate));
        }
    }
    if (xs.size() < 2)
        throw NumericalError("slope-fit: fewer than 2 thresholds with nonzero exceedance");
    const LineFit fit = fit_line(xs, ys);
    const double kappa0 = kappa(0.0, h, 0.0);
    report.calibrated["slope"] = fit.slope;
    report.rows.push_back({fmt(cfg.H), fmt(fit.slope), fmt(kappa0), fmt(fit.slope / kappa0),
                           std::to_string(xs.size()), std::to_string(cfg.seed)});
    report.plot_description =
        plot_header("slope-fit", "Fitted exit-exponent slope vs kappa(0)") +
        "x H\ny slope\nseries slope from results.csv x=H y=slope style=points\n"
        "curve kappa0 from results.csv x=H y=kappa0 style=line\n";
    return report;
}

} // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    switch (cfg.kind) {
        case ExperimentKind::Variance: report = run_variance(cfg); break;
        case ExperimentKind::SdeExit: report = run_sde_exit(cfg); break;
        case ExperimentKind::SpdeExit: report = run_spde_exit(cfg); break;
        case ExperimentKind::Schauder: report = run_schauder(cfg); break;
        case ExperimentKind::CalibrateK0: report = run_calibrate_k0(cfg); break;
        case ExperimentKind::SlopeFit: report = run_slope_fit(cfg); break;
    }
    report.config = cfg;
    report.version = FRACSTRIP_VERSION;
    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return report;
}

double calibrate_k0(const ExperimentConfig& cfg) {
    if (cfg.kind != ExperimentKind::CalibrateK0)
        throw ValidationError("calibrate_k0: config kind must be calibrate-k0");
    return run_experiment(cfg).calibrated.at("k0");
}

} // namespace fracstrip
