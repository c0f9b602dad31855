#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "cflow/observables.hpp"
#include "cflow/operators.hpp"
#include "cflow/state.hpp"

namespace cflow {

/// [F(alpha)]_n = (1/(n+1)) sum_j sum_k S conj(alpha_j) alpha_k alpha_{n+j-k}, all indices < N.
/// Direct O(N^3) evaluation.
ModeVector vector_field_naive(const ModeVector& alpha);

/// Same field in O(N^2) from the layered pair sums:
///   (n+1) F_n = sum_{l<=n} G_l(n),   G_l(n) = sum_{j>=l} conj(alpha_j) C_l(n+j),
/// with G_l(n) = G_{l+1}(n) + conj(alpha_l) C_l(n+l) + 2 alpha_l sum_{j>l} conj(alpha_j) alpha_{j+n-l}.
ModeVector vector_field_fast(const ModeVector& alpha);

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    double max_step = std::numeric_limits<double>::infinity();
    double t_end = 1.0;
    double sample_dt = 0.1;
    /// Rescale onto the initial Q-sphere after every accepted step (logged when active).
    bool renormalize_Q = false;
    /// Integrate d(alpha)/dt = +i F(alpha), i.e. run the flow backwards for time t_end.
    bool reverse_time = false;
    /// Compare fast and naive fields every this many accepted steps (0 disables).
    long oracle_check_stride = 1000;
    /// The oracle check only runs at or below this truncation.
    Index oracle_check_max_modes = 48;
    /// Mode indices whose re/im columns are written to trajectory CSV.
    std::vector<Index> recorded_modes;
    long max_steps = 100'000'000;

    void validate() const;
};

struct StepStatistics {
    long accepted = 0;
    long rejected = 0;
    long rhs_evaluations = 0;
    long oracle_checks = 0;
    double max_oracle_deviation = 0.0;
    long renormalizations = 0;
};

/// Samples of one trajectory. Immutable once returned by integrate().
struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<ModeVector> states;
    std::vector<ConservedTriple> conserved;
    StepStatistics stats;
    bool reverse_time = false;

    std::size_t samples() const noexcept { return times.size(); }
    const ModeVector& final_state() const { return states.back(); }

    /// max_t |X(t) - X(0)| / |X(0)| for H, Q, E (absolute when X(0) = 0).
    ConservedTriple max_relative_drift() const;
};

/// Solves d(alpha)/dt = -i F(alpha) with adaptive Dormand-Prince 5(4). Steps are
/// capped at sample times so samples are step endpoints.
/// Throws StepSizeUnderflow or NonFiniteState with the time reached.
TrajectoryRecord integrate(const ModeVector& alpha0, const IntegratorConfig& cfg);

/// (da/dt, db/dt) = (M^{-1} L- b, -M^{-1} L+ a).
std::pair<Eigen::VectorXd, Eigen::VectorXd> linearized_rhs(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                                           const OperatorPair& ops);

struct LinearizedSolution {
    Eigen::VectorXd a;
    Eigen::VectorXd b;
    long steps = 0;
};

/// Integrates the linearized system from (a0, b0) to t_end with the same adaptive scheme.
LinearizedSolution integrate_linearized(const Eigen::VectorXd& a0, const Eigen::VectorXd& b0,
                                        const OperatorPair& ops, double t_end, double rel_tol = 1e-12,
                                        double abs_tol = 1e-14);

}  // namespace cflow
