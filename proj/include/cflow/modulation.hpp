#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cflow/flow.hpp"
#include "cflow/state.hpp"

namespace cflow {

/// alpha_n = e^{i(theta + mu + mu n)} (c A_n(p) + a_n + i b_n).
struct ModulationFrame {
    double c = 1.0;
    double p = 0.0;
    double theta = 0.0;
    double mu = 0.0;
    Eigen::VectorXd a;
    Eigen::VectorXd b;
    /// False for frames from the p = 0 form, where mu carries no information.
    bool mu_determinate = true;
    int iterations = 0;
    /// max of |<MA,a>|, |<MA',a>|, |<MA,b>|, |<MA',b>| (only the MA terms at p = 0).
    double constraint_residual = 0.0;
    /// Constraint residual after each Newton update.
    std::vector<double> newton_residuals;

    /// Phase in the orbit convention e^{i theta' + i mu n}.
    double theta_orbit() const { return theta + mu; }
    ModeVector reconstruct() const;
};

struct DecomposeOptions {
    /// Size of the neighbourhood in which the decomposition is attempted.
    double delta0 = 0.1;
    int max_iterations = 60;
    /// Newton stops once the constraint residual is below this (absolute).
    double tolerance = 1e-14;
    /// Accepted residual when the iteration stalls at rounding level.
    double acceptance = 1e-11;
    /// Below this p the 2-parameter form is used.
    double p_switch = 0.02;
};

/// Two-parameter decomposition about A(0) = e_0 (mu = 0, p = 0). Throws NoConvergence
/// when alpha is outside the delta0 neighbourhood or the iteration fails.
ModulationFrame decompose_p0(const ModeVector& alpha, const DecomposeOptions& opts = {});

/// Four-parameter decomposition about the ground-state family, seeded by a coarse
/// orbit scan at p_init. Falls back to decompose_p0 when p_init < p_switch.
ModulationFrame decompose(const ModeVector& alpha, double p_init, const DecomposeOptions& opts = {});

/// Continuation: Newton seeded with a previous frame.
ModulationFrame decompose(const ModeVector& alpha, const ModulationFrame& seed, const DecomposeOptions& opts = {});

struct OrbitDistanceResult {
    double distance = 0.0;
    double theta = 0.0;  ///< orbit convention
    double mu = 0.0;
    WeightedNormOrder order{0.0};
};

/// inf over (theta, mu) of ||alpha - e^{i theta + i mu n} A(p)||_{h^s}.
OrbitDistanceResult orbit_distance(const ModeVector& alpha, double p, WeightedNormOrder s);

/// c^2 (1+p^2)/(1-p^2) + ||Ma||^2 + ||Mb||^2, which equals E(alpha) for a valid frame.
double energy_budget(const ModulationFrame& frame);

struct ModulationSample {
    double t = 0.0;
    ModulationFrame frame;
    double dist_h12 = 0.0;
    double dist_h1 = 0.0;
    /// |energy_budget - E(alpha(0))|.
    double budget_error = 0.0;
};

struct ModulationTrack {
    std::vector<ModulationSample> samples;
    double E0 = 0.0;
    double p_init = 0.0;

    double sup_dist_h12() const;
    double sup_dist_h1() const;
    double min_p() const;
    double max_p_drop() const;  ///< max_t (p_init - p(t))
    double max_budget_error() const;
    double max_constraint_residual() const;
};

/// Decomposes every sample with continuation from the previous frame. A failure is
/// rethrown as NoConvergence naming the sample index.
ModulationTrack track_modulation(const TrajectoryRecord& traj, double p_init, const DecomposeOptions& opts = {});

}  // namespace cflow
