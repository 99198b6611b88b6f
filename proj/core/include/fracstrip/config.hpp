#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fracstrip {

enum class ExperimentKind { Variance, SdeExit, SpdeExit, Schauder, CalibrateK0, SlopeFit };

std::string to_string(ExperimentKind kind);
ExperimentKind kind_from_string(const std::string& name);

/// Symbolic drift selection shared by the experiment kinds.
///   const:  a(t) = -base                       (linear)
///   sin:    a(t) = -(base + amp sin(omega t))  (linear)
///   cubic:  f(t,x) = x - x^3 + amp sin(omega t) (nonlinear)
struct DriftSpec {
    std::string tag = "const";
    double base = 1.0;
    double amp = 0.1;
    double omega = 1.0;
    // nonlinear extras (quadratic remainder constants, branch seed)
    double m_const = 3.7;
    double d_const = 0.5;
    double x0_guess = -1.0;

    bool linear() const { return tag == "const" || tag == "sin"; }
};

/// Flat key-value experiment configuration. Unknown keys and out-of-schema
/// values are rejected at load time; every field carries a default that the
/// loader echoes back.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Variance;
    DriftSpec drift;

    double H = 0.5;
    double eps = 0.01;
    double sigma = 0.05;
    double T = 1.0;
    long N = 4096;
    long replicas = 10000;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out_dir = "fracstrip-out";

    // variance
    int t_points = 20;
    double quad_tol = 1e-8;
    long var_replicas_min = 100;

    // exit experiments
    std::vector<double> h_over_sigma = {2.0, 2.5, 3.0, 3.5, 4.0};
    double k0 = 1.0;
    double r1 = -1.0; // < 0: calibrate from the drift
    double r2 = -1.0; // < 0: use calibrated r1
    double ci_level = 0.95;
    std::string k0_file; // optional calibrate-k0 report to read K0 from

    // spde
    int K = 64;
    double s = 0.3;
    double eta = -1.0; // < 0: default 2H - s - 1/2
    double q_exp = -1.0, r_exp = -1.0; // nonlinear strip Schauder pair; < 0: q = r = s
    double cprime = -1.0; // < 0: estimate from the Schauder scan
    double nl_m = -1.0;   // nonlinear remainder constant; < 0: drift m_const

    // schauder
    std::vector<double> schauder_r = {0.2, 0.4, 0.2};
    std::vector<double> schauder_dq = {0.5, 1.0, 1.5};
    int schauder_K = 8192;
    int schauder_fields = 16;

    // calibrate-k0
    std::vector<double> thresholds = {3.0, 3.25, 3.5, 3.75, 4.0}; // in stationary sigmas
    double k0_grid_ratio = 1.1;

    // slope-fit
    double fit_lo = 2.5, fit_hi = 4.0;
};

/// Parses the flat `key = value` format (# comments, blank lines allowed).
/// Unknown keys are errors naming the key; values are validated against the
/// kind's schema with errors naming the offending key and constraint.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

/// The keys accepted for each kind (used by the loader and mirrored in docs).
const std::map<std::string, std::vector<std::string>>& config_schema();

} // namespace fracstrip
