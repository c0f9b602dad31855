#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cflow/lab/config.hpp"
#include "cflow/modulation.hpp"

namespace cflow::lab {

/// A(p0) + generate_perturbation over the full support with h^1 norm cfg.delta.
ModeVector perturbed_ground_state(const ExperimentConfig& cfg, std::uint64_t seed);

struct DriftMember {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double sup_dist_h12 = 0.0;
    double sup_dist_h1 = 0.0;
    double min_p = 0.0;
    double max_p_drop = 0.0;
    /// sup_t dist_h1 / (delta + max(0, p0 - p(t))^{1/2}).
    double bound_ratio = 0.0;
    double max_budget_error = 0.0;
    double max_constraint_residual = 0.0;
    double max_conservation_drift = 0.0;
};

struct DriftStudyReport {
    std::vector<DriftMember> members;
    long failed = 0;
    /// Over successful members.
    double sup_dist_h12 = 0.0;
    double sup_dist_h1 = 0.0;
    double min_p = 0.0;
    double max_p_drop = 0.0;
    double h12_constant = 0.0;  ///< sup dist_h12 / delta
    double h1_constant = 0.0;   ///< sup bound_ratio
    double max_budget_error = 0.0;
};

/// Ensemble of seeded perturbations of A(p0): integrate, track modulation, summarize.
/// Members run concurrently; failures are recorded, not propagated. Writes per-member
/// CSVs and a summary under cfg.out_dir unless it is empty.
DriftStudyReport run_drift_study(const ExperimentConfig& cfg);

struct InequalityReport {
    long random_samples = 0;
    double min_gap_random = 0.0;
    long geometric_samples = 0;
    double max_gap_geometric = 0.0;
    double gap_two_modes = 0.0;  ///< alpha = (1, 1, 0, ...)
};

/// Q^2 - H over random states (cfg.samples, cfg.n) and 100 random geometric sequences |p| <= 0.8.
InequalityReport run_inequality_scan(const ExperimentConfig& cfg);

struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct SuiteReport {
    std::vector<CheckResult> checks;
    bool all_pass() const;
};

/// Spectral checks on the grid p in {0, 0.3, 0.6} (truncation cfg.n, at least 128) and single
/// modes 0..2. Writes spectrum tables under cfg.out_dir unless it is empty.
SuiteReport run_spectrum_suite(const ExperimentConfig& cfg);

/// Operator identities, series identities, ladder and mode-energy checks.
SuiteReport verify_identities(const ExperimentConfig& cfg);

struct ScalingPoint {
    double delta = 0.0;
    double sup_dist_h1 = 0.0;
};

struct ScalingReport {
    std::vector<ScalingPoint> points;
    double slope = 0.0;  ///< least-squares log-log slope
};

/// sup_{t <= t_end} dist_h1(alpha(t), orbit of A(0)) for perturbations of A(0) of each size.
ScalingReport ground_zero_scaling(const std::vector<double>& deltas, bool zero_mode0, Index n, double t_end,
                                  std::uint64_t seed, double rel_tol = 1e-10);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

std::string report_text(const SuiteReport& report);

}  // namespace cflow::lab
