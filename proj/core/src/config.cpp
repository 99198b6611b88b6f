#include "fracstrip/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "fracstrip/errors.hpp"

namespace fracstrip {

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Variance: return "variance";
        case ExperimentKind::SdeExit: return "sde-exit";
        case ExperimentKind::SpdeExit: return "spde-exit";
        case ExperimentKind::Schauder: return "schauder";
        case ExperimentKind::CalibrateK0: return "calibrate-k0";
        case ExperimentKind::SlopeFit: return "slope-fit";
    }
    return "?";
}

ExperimentKind kind_from_string(const std::string& name) {
    if (name == "variance") return ExperimentKind::Variance;
    if (name == "sde-exit") return ExperimentKind::SdeExit;
    if (name == "spde-exit") return ExperimentKind::SpdeExit;
    if (name == "schauder") return ExperimentKind::Schauder;
    if (name == "calibrate-k0") return ExperimentKind::CalibrateK0;
    if (name == "slope-fit") return ExperimentKind::SlopeFit;
    throw ValidationError("unknown experiment kind '" + name +
                          "' (expected variance | sde-exit | spde-exit | schauder | "
                          "calibrate-k0 | slope-fit)");
}

namespace {

const std::vector<std::string> kCommonKeys = {
    "kind",      "seed",     "threads",    "out",     "H",       "eps",
    "sigma",     "T",        "N",          "replicas", "drift",  "drift_base",
    "drift_amp", "drift_omega", "drift_m", "drift_d", "drift_x0", "ci_level"};

std::map<std::string, std::vector<std::string>> build_schema() {
    std::map<std::string, std::vector<std::string>> schema;
    schema["variance"] = {"t_points", "quad_tol"};
    schema["sde-exit"] = {"h_grid", "k0", "r1", "r2", "k0_file", "fit_lo", "fit_hi", "quad_tol"};
    schema["spde-exit"] = {"h_grid", "k0",     "r1", "r2",   "k0_file", "K",
                           "s",      "eta",    "q",  "r",    "cprime",  "nl_m",
                           "fit_lo", "fit_hi", "quad_tol"};
    schema["schauder"] = {"schauder_r", "schauder_dq", "schauder_K", "schauder_fields"};
    schema["calibrate-k0"] = {"thresholds", "k0_grid_ratio", "r1", "quad_tol"};
    schema["slope-fit"] = {"h_grid", "fit_lo", "fit_hi", "k0", "r1", "r2", "quad_tol"};
    return schema;
}

struct RawEntry {
    std::string value;
    int line = 0;
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& message) {
    throw ValidationError(origin + ":" + std::to_string(line) + ": " + message);
}

double parse_double(const std::string& origin, const std::string& key, const RawEntry& raw) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(raw.value, &pos);
        if (pos != raw.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        fail(origin, raw.line, "key '" + key + "': expected a number, got '" + raw.value + "'");
    }
}

long parse_long(const std::string& origin, const std::string& key, const RawEntry& raw) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(raw.value, &pos);
        if (pos != raw.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        fail(origin, raw.line, "key '" + key + "': expected an integer, got '" + raw.value + "'");
    }
}

std::vector<double> parse_list(const std::string& origin, const std::string& key,
                               const RawEntry& raw) {
    std::vector<double> out;
    std::stringstream ss(raw.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(origin, raw.line, "key '" + key + "': empty list element");
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            fail(origin, raw.line, "key '" + key + "': bad list element '" + item + "'");
        }
    }
    if (out.empty()) fail(origin, raw.line, "key '" + key + "': empty list");
    return out;
}

} // namespace

const std::map<std::string, std::vector<std::string>>& config_schema() {
    static const std::map<std::string, std::vector<std::string>> schema = build_schema();
    return schema;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    std::map<std::string, RawEntry> raw;
    std::istringstream stream(text);
    std::string line;
    int lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            fail(origin, lineno, "expected 'key = value' (column " +
                                     std::to_string(stripped.size()) + ": no '=' found)");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) fail(origin, lineno, "empty key before '='");
        if (value.empty()) fail(origin, lineno, "key '" + key + "': empty value");
        if (raw.count(key)) fail(origin, lineno, "duplicate key '" + key + "'");
        raw[key] = RawEntry{value, lineno};
    }

    auto it = raw.find("kind");
    if (it == raw.end()) throw ValidationError(origin + ": missing required key 'kind'");
    ExperimentConfig cfg;
    try {
        cfg.kind = kind_from_string(it->second.value);
    } catch (const ValidationError& e) {
        fail(origin, it->second.line, e.what());
    }
    const std::string kind_name = to_string(cfg.kind);

    // Unknown keys are errors: no silent defaults for misspellings.
    std::set<std::string> allowed(kCommonKeys.begin(), kCommonKeys.end());
    for (const auto& k : config_schema().at(kind_name)) allowed.insert(k);
    for (const auto& [key, entry] : raw)
        if (!allowed.count(key))
            fail(origin, entry.line,
                 "unknown key '" + key + "' for kind '" + kind_name + "'");

    auto get = [&](const std::string& key) -> const RawEntry* {
        auto found = raw.find(key);
        return found == raw.end() ? nullptr : &found->second;
    };
    auto num = [&](const std::string& key, double& slot) {
        if (const RawEntry* e = get(key)) slot = parse_double(origin, key, *e);
    };
    auto integer = [&](const std::string& key, long& slot) {
        if (const RawEntry* e = get(key)) slot = parse_long(origin, key, *e);
    };

    if (const RawEntry* e = get("seed")) {
        const long v = parse_long(origin, "seed", *e);
        if (v < 0) fail(origin, e->line, "key 'seed': must be >= 0");
        cfg.seed = static_cast<std::uint64_t>(v);
    }
    if (const RawEntry* e = get("threads")) {
        const long v = parse_long(origin, "threads", *e);
        if (v < 0) fail(origin, e->line, "key 'threads': must be >= 0 (0 = hardware)");
        cfg.threads = static_cast<int>(v);
    }
    if (const RawEntry* e = get("out")) cfg.out_dir = e->value;

    num("H", cfg.H);
    num("eps", cfg.eps);
    num("sigma", cfg.sigma);
    num("T", cfg.T);
    integer("N", cfg.N);
    integer("replicas", cfg.replicas);
    num("ci_level", cfg.ci_level);

    if (const RawEntry* e = get("drift")) {
        cfg.drift.tag = e->value;
        if (cfg.drift.tag != "const" && cfg.drift.tag != "sin" && cfg.drift.tag != "cubic")
            fail(origin, e->line, "key 'drift': expected const | sin | cubic");
    }
    num("drift_base", cfg.drift.base);
    num("drift_amp", cfg.drift.amp);
    num("drift_omega", cfg.drift.omega);
    num("drift_m", cfg.drift.m_const);
    num("drift_d", cfg.drift.d_const);
    num("drift_x0", cfg.drift.x0_guess);

    // kind-specific keys
    if (const RawEntry* e = get("t_points")) {
        cfg.t_points = static_cast<int>(parse_long(origin, "t_points", *e));
    }
    num("quad_tol", cfg.quad_tol);
    if (const RawEntry* e = get("h_grid")) cfg.h_over_sigma = parse_list(origin, "h_grid", *e);
    num("k0", cfg.k0);
    num("r1", cfg.r1);
    num("r2", cfg.r2);
    if (const RawEntry* e = get("k0_file")) cfg.k0_file = e->value;
    if (const RawEntry* e = get("K")) cfg.K = static_cast<int>(parse_long(origin, "K", *e));
    num("s", cfg.s);
    num("eta", cfg.eta);
    num("q", cfg.q_exp);
    num("r", cfg.r_exp);
    num("cprime", cfg.cprime);
    num("nl_m", cfg.nl_m);
    if (const RawEntry* e = get("schauder_r")) cfg.schauder_r = parse_list(origin, "schauder_r", *e);
    if (const RawEntry* e = get("schauder_dq"))
        cfg.schauder_dq = parse_list(origin, "schauder_dq", *e);
    if (const RawEntry* e = get("schauder_K"))
        cfg.schauder_K = static_cast<int>(parse_long(origin, "schauder_K", *e));
    if (const RawEntry* e = get("schauder_fields"))
        cfg.schauder_fields = static_cast<int>(parse_long(origin, "schauder_fields", *e));
    if (const RawEntry* e = get("thresholds")) cfg.thresholds = parse_list(origin, "thresholds", *e);
    num("k0_grid_ratio", cfg.k0_grid_ratio);
    num("fit_lo", cfg.fit_lo);
    num("fit_hi", cfg.fit_hi);

    // Cross-field validation with errors naming the offending key.
    auto check = [&](bool ok, const std::string& message) {
        if (!ok) throw ValidationError(origin + ": " + message);
    };
    check(cfg.H > 0.0 && cfg.H < 1.0, "H out of (0,1): " + std::to_string(cfg.H));
    check(cfg.eps > 0.0, "eps must be > 0");
    check(cfg.sigma >= 0.0, "sigma must be >= 0");
    check(cfg.T > 0.0, "T must be > 0");
    check(cfg.N >= 2, "N must be >= 2");
    check(cfg.replicas >= 1, "replicas must be >= 1");
    check(cfg.ci_level > 0.0 && cfg.ci_level < 1.0, "ci_level out of (0,1)");
    check(cfg.quad_tol > 0.0, "quad_tol must be > 0");
    if (cfg.drift.tag == "sin")
        check(cfg.drift.base > std::abs(cfg.drift.amp),
              "drift_base must exceed |drift_amp| so a(t) stays below -a0");
    if (cfg.kind == ExperimentKind::Variance || cfg.kind == ExperimentKind::CalibrateK0 ||
        cfg.kind == ExperimentKind::SlopeFit)
        check(cfg.drift.linear(), "kind '" + kind_name + "' requires a linear drift (const|sin)");
    if (cfg.kind == ExperimentKind::Variance) check(cfg.t_points >= 1, "t_points must be >= 1");
    if (cfg.kind == ExperimentKind::SdeExit || cfg.kind == ExperimentKind::SpdeExit ||
        cfg.kind == ExperimentKind::SlopeFit) {
        check(!cfg.h_over_sigma.empty(), "h_grid must be non-empty");
        for (double m : cfg.h_over_sigma) check(m > 0.0, "h_grid entries must be > 0");
        check(cfg.k0 > 0.0, "k0 must be > 0");
        check(cfg.sigma > 0.0, "sigma must be > 0 for exit experiments");
    }
    if (cfg.kind == ExperimentKind::SpdeExit) {
        check(cfg.H > 0.25, "spde-exit requires H > 1/4, got H = " + std::to_string(cfg.H));
        check(cfg.s > 0.0 && cfg.s < 2.0 * cfg.H - 0.5,
              "s = " + std::to_string(cfg.s) + " violates s in (0, 2H - 1/2) = (0, " +
                  std::to_string(2.0 * cfg.H - 0.5) + ")");
        check(cfg.K >= 0, "K must be >= 0");
    }
    if (cfg.kind == ExperimentKind::Schauder) {
        check(cfg.schauder_r.size() == cfg.schauder_dq.size(),
              "schauder_r and schauder_dq must have matching lengths");
        check(cfg.schauder_K >= 64, "schauder_K must be >= 64");
        check(cfg.schauder_fields >= 1, "schauder_fields must be >= 1");
        for (std::size_t i = 0; i < cfg.schauder_r.size(); ++i) {
            check(cfg.schauder_r[i] > 0.0, "schauder_r entries must be > 0");
            check(cfg.schauder_dq[i] > 0.0 && cfg.schauder_dq[i] < 2.0,
                  "schauder_dq entries must lie in (0,2) (q < r + 2)");
        }
    }
    if (cfg.kind == ExperimentKind::CalibrateK0) {
        check(cfg.thresholds.size() >= 2, "need at least 2 thresholds");
        for (std::size_t i = 0; i < cfg.thresholds.size(); ++i) {
            check(cfg.thresholds[i] > 0.0, "thresholds must be > 0");
            if (i > 0)
                check(cfg.thresholds[i] > cfg.thresholds[i - 1],
                      "thresholds must be strictly increasing");
        }
        check(cfg.k0_grid_ratio > 1.0, "k0_grid_ratio must be > 1");
    }
    if (cfg.kind == ExperimentKind::SlopeFit || cfg.kind == ExperimentKind::SdeExit)
        check(cfg.fit_lo > 0.0 && cfg.fit_hi > cfg.fit_lo, "need 0 < fit_lo < fit_hi");

    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

} // namespace fracstrip
