#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "cflow/flow.hpp"

namespace cflow::lab {

enum class ExperimentKind { simulate, spectrum, inequality, decompose, drift_study, verify_identities };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_kind(std::string_view name);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::simulate;
    Index n = 64;
    double p0 = 0.5;
    double delta = 1e-3;  ///< h^1 norm of the perturbation
    std::uint64_t seed = 1;
    IntegratorConfig integrator{};
    std::filesystem::path out_dir = "out";
    int ensemble = 32;
    /// Suppress the mode-0 entry of perturbations.
    bool zero_mode0 = false;
    /// Modulation neighbourhood size.
    double delta0 = 0.1;
    /// Random samples for the inequality scan.
    long samples = 10000;

    /// Throws ValidationError unless delta >= 0, N >= 8, p0 in [0,1) and the integrator settings are sane.
    void validate() const;
};

/// Applies one key = value setting. Keys mirror the CLI flags (n, p0, delta, seed, t-end,
/// out, rel-tol) plus abs-tol, sample-dt, ensemble, zero-mode0, delta0, samples, kind.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Reads key = value lines; '#' starts a comment. Throws ValidationError on unknown keys
/// or unparsable values.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Config rendered as JSON metadata (includes a version tag).
std::string config_json(const ExperimentConfig& cfg);

inline constexpr std::string_view kVersion = "cflow 1.0.0";

}  // namespace cflow::lab
