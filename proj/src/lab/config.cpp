#include "cflow/lab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "json.hpp"

#include "cflow/errors.hpp"

namespace cflow::lab {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end)
        throw ValidationError("config: cannot parse value '" + std::string(value) + "' for key '" + std::string(key) +
                              "'");
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ValidationError("config: expected a boolean for key '" + std::string(key) + "'");
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::simulate: return "simulate";
        case ExperimentKind::spectrum: return "spectrum";
        case ExperimentKind::inequality: return "inequality";
        case ExperimentKind::decompose: return "decompose";
        case ExperimentKind::drift_study: return "drift-study";
        case ExperimentKind::verify_identities: return "verify-identities";
    }
    return "unknown";
}

ExperimentKind parse_kind(std::string_view name) {
    for (auto k : {ExperimentKind::simulate, ExperimentKind::spectrum, ExperimentKind::inequality,
                   ExperimentKind::decompose, ExperimentKind::drift_study, ExperimentKind::verify_identities})
        if (to_string(k) == name) return k;
    throw ValidationError("unknown experiment kind '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw ValidationError("config: delta must be a finite value >= 0");
    if (n < 8) throw ValidationError("config: truncation N must be at least 8");
    if (!(p0 >= 0.0 && p0 < 1.0)) throw ValidationError("config: p0 must lie in [0, 1)");
    if (ensemble < 1) throw ValidationError("config: ensemble size must be positive");
    if (!(delta0 > 0.0)) throw ValidationError("config: delta0 must be positive");
    if (samples < 1) throw ValidationError("config: samples must be positive");
    integrator.validate();
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "n")
        cfg.n = parse_number<long>(key, value);
    else if (key == "p0")
        cfg.p0 = parse_number<double>(key, value);
    else if (key == "delta")
        cfg.delta = parse_number<double>(key, value);
    else if (key == "seed")
        cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "t-end")
        cfg.integrator.t_end = parse_number<double>(key, value);
    else if (key == "out")
        cfg.out_dir = std::string(value);
    else if (key == "rel-tol")
        cfg.integrator.rel_tol = parse_number<double>(key, value);
    else if (key == "abs-tol")
        cfg.integrator.abs_tol = parse_number<double>(key, value);
    else if (key == "sample-dt")
        cfg.integrator.sample_dt = parse_number<double>(key, value);
    else if (key == "ensemble")
        cfg.ensemble = parse_number<int>(key, value);
    else if (key == "zero-mode0")
        cfg.zero_mode0 = parse_bool(key, value);
    else if (key == "delta0")
        cfg.delta0 = parse_number<double>(key, value);
    else if (key == "samples")
        cfg.samples = parse_number<long>(key, value);
    else if (key == "kind")
        cfg.kind = parse_kind(value);
    else
        throw ValidationError("config: unknown key '" + std::string(key) + "'");
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError("config: " + path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        apply_setting(base, view.substr(0, eq), view.substr(eq + 1));
    }
    return base;
}

std::string config_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["kind"] = to_string(cfg.kind);
    j["n"] = cfg.n;
    j["p0"] = cfg.p0;
    j["delta"] = cfg.delta;
    j["seed"] = cfg.seed;
    j["rng"] = "splitmix64-counter";
    j["t_end"] = cfg.integrator.t_end;
    j["rel_tol"] = cfg.integrator.rel_tol;
    j["abs_tol"] = cfg.integrator.abs_tol;
    j["sample_dt"] = cfg.integrator.sample_dt;
    j["ensemble"] = cfg.ensemble;
    j["zero_mode0"] = cfg.zero_mode0;
    j["delta0"] = cfg.delta0;
    j["samples"] = cfg.samples;
    j["out"] = cfg.out_dir.string();
    return j.dump(2) + "\n";
}

}  // namespace cflow::lab
