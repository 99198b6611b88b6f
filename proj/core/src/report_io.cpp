#include <charconv>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fracstrip/errors.hpp"
#include "fracstrip/experiments.hpp"

namespace fracstrip {

std::string format_cell(double value) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    if (res.ec != std::errc())
        throw NumericalError("format_cell: value not representable");
    return std::string(buf, res.ptr);
}

namespace {

nlohmann::json config_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["kind"] = to_string(c.kind);
    j["H"] = c.H;
    j["eps"] = c.eps;
    j["sigma"] = c.sigma;
    j["T"] = c.T;
    j["N"] = c.N;
    j["replicas"] = c.replicas;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["out"] = c.out_dir;
    j["drift"] = {{"tag", c.drift.tag},     {"base", c.drift.base},
                  {"amp", c.drift.amp},     {"omega", c.drift.omega},
                  {"m", c.drift.m_const},   {"d", c.drift.d_const},
                  {"x0_guess", c.drift.x0_guess}};
    j["ci_level"] = c.ci_level;
    switch (c.kind) {
        case ExperimentKind::Variance:
            j["t_points"] = c.t_points;
            j["quad_tol"] = c.quad_tol;
            break;
        case ExperimentKind::SdeExit:
        case ExperimentKind::SlopeFit:
            j["h_grid"] = c.h_over_sigma;
            j["k0"] = c.k0;
            j["fit_lo"] = c.fit_lo;
            j["fit_hi"] = c.fit_hi;
            break;
        case ExperimentKind::SpdeExit:
            j["h_grid"] = c.h_over_sigma;
            j["k0"] = c.k0;
            j["K"] = c.K;
            j["s"] = c.s;
            j["eta"] = c.eta;
            j["q"] = c.q_exp;
            j["r"] = c.r_exp;
            j["cprime"] = c.cprime;
            break;
        case ExperimentKind::Schauder:
            j["schauder_r"] = c.schauder_r;
            j["schauder_dq"] = c.schauder_dq;
            j["schauder_K"] = c.schauder_K;
            j["schauder_fields"] = c.schauder_fields;
            break;
        case ExperimentKind::CalibrateK0:
            j["thresholds"] = c.thresholds;
            j["k0_grid_ratio"] = c.k0_grid_ratio;
            break;
    }
    return j;
}

} // namespace

void write_outputs(const RunReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const fs::path dir(out_dir);
    fs::create_directories(dir);

    {
        std::ofstream csv(dir / "results.csv", std::ios::binary);
        if (!csv) throw NumericalError("cannot write " + (dir / "results.csv").string());
        for (std::size_t i = 0; i < report.columns.size(); ++i)
            csv << (i ? "," : "") << report.columns[i];
        csv << "\n";
        for (const auto& row : report.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << row[i];
            csv << "\n";
        }
    }
    {
        nlohmann::json j;
        j["version"] = report.version;
        j["kind"] = to_string(report.config.kind);
        j["seed"] = report.config.seed;
        j["wall_ms"] = report.wall_ms;
        j["columns"] = report.columns;
        j["row_count"] = report.rows.size();
        j["calibrated"] = report.calibrated;
        j["config"] = config_json(report.config);
        std::ofstream meta(dir / "report.json", std::ios::binary);
        if (!meta) throw NumericalError("cannot write " + (dir / "report.json").string());
        meta << j.dump(2) << "\n";
    }
    {
        std::ofstream plot(dir / "plot.txt", std::ios::binary);
        if (!plot) throw NumericalError("cannot write " + (dir / "plot.txt").string());
        plot << report.plot_description;
    }
}

} // namespace fracstrip
