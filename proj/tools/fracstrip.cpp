// fracstrip: configuration-driven runner for the concentration experiments.
//
//   fracstrip <kind> --config <path> [--seed N] [--out DIR] [--threads N]
//
// kinds: variance | sde-exit | spde-exit | schauder | calibrate-k0 | slope-fit
// Exit codes: 0 success, 2 validation/usage error, 3 numerical failure.
// FRACSTRIP_OUT and FRACSTRIP_THREADS override the output directory and
// thread count (CLI flags take precedence over the environment).

#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "fracstrip/errors.hpp"
#include "fracstrip/experiments.hpp"

namespace {

int run_kind(fracstrip::ExperimentKind kind, const std::string& config_path, long seed_override,
             const std::string& out_override, int threads_override) {
    fracstrip::ExperimentConfig cfg = fracstrip::load_config(config_path);
    if (cfg.kind != kind)
        throw fracstrip::ValidationError("config kind '" + to_string(cfg.kind) +
                                         "' does not match subcommand '" + to_string(kind) + "'");
    if (const char* env_out = std::getenv("FRACSTRIP_OUT")) cfg.out_dir = env_out;
    if (const char* env_threads = std::getenv("FRACSTRIP_THREADS"))
        cfg.threads = std::atoi(env_threads);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (threads_override >= 0) cfg.threads = threads_override;

    const fracstrip::RunReport report = fracstrip::run_experiment(cfg);
    fracstrip::write_outputs(report, cfg.out_dir);

    std::printf("%s: %zu rows -> %s (%.0f ms)\n", to_string(cfg.kind).c_str(),
                report.rows.size(), cfg.out_dir.c_str(), report.wall_ms);
    for (const auto& [name, value] : report.calibrated)
        std::printf("  %s = %.6g\n", name.c_str(), value);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for sample-path concentration of fBm-driven "
                 "slow-fast SDEs/SPDEs"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    long seed_override = -1;
    int threads_override = -1;

    const char* kinds[] = {"variance", "sde-exit", "spde-exit",
                           "schauder", "calibrate-k0", "slope-fit"};
    for (const char* kind : kinds) {
        CLI::App* sub = app.add_subcommand(kind, std::string("run a ") + kind + " experiment");
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--seed", seed_override, "override the master seed");
        sub->add_option("--out", out_override, "override the output directory");
        sub->add_option("--threads", threads_override, "override the worker count (0 = hardware)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const std::string chosen = app.get_subcommands().front()->get_name();
        return run_kind(fracstrip::kind_from_string(chosen), config_path, seed_override,
                        out_override, threads_override);
    } catch (const fracstrip::ValidationError& e) {
        std::fprintf(stderr, "fracstrip: validation error: %s\n", e.what());
        return 2;
    } catch (const fracstrip::NumericalError& e) {
        std::fprintf(stderr, "fracstrip: numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fracstrip: %s\n", e.what());
        return 3;
    }
}
