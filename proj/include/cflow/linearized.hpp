#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cflow/operators.hpp"
#include "cflow/state.hpp"

namespace cflow {

/// L+-(p) about the normalized ground state:
///   [L+-]_{nj} = 2p^{|n-j|} - 2p^{2+n+j} +- (1-p^2)^2 (n+1)(j+1) p^{n+j} - (n+1) delta_{nj},
/// assembled as Toeplitz minus rank one +- rank one minus M.
/// Throws ValidationError for p outside [0,1); logs a warning when p^N > tail_tol.
OperatorPair build_ground_ops(double p, Index n, double tail_tol = 1e-12);

/// L+- about c delta_{n,mode}: diagonal 2min(n,mode)+1-n, reflected coupling
/// +-(min(n,mode,2mode-n)+1) on n <= 2 mode, all scaled by c^2 (lambda = c^2).
/// Requires n > 2 mode.
OperatorPair build_single_mode_ops(Index mode, double c, Index n);

enum class Which { plus, minus };

struct SpectralReport {
    Eigen::VectorXd eigenvalues;   ///< descending
    Eigen::MatrixXd eigenvectors;  ///< columns match eigenvalues
    Eigen::VectorXd residuals;     ///< ||L v - lambda v|| per pair
    Index zero_modes = 0;          ///< count with |lambda| <= zero_tol
    double operator_norm = 0.0;
    double zero_tol = 0.0;
    std::string about;
    Index truncation = 0;
    Which which = Which::plus;
};

/// Full symmetric eigendecomposition. Throws NumericalError if the solver fails.
SpectralReport spectrum(const OperatorPair& ops, Which which);

/// Zero-mode bookkeeping for the ground state: residuals of the explicit kernel
/// vectors (0,A), (0,MA), (A',0) of [[0, L-], [-L+, 0]] and of the Jordan partner
/// -(A, 0)/2 solving  calL a1 = calM (0, A).
struct GroundZeroModes {
    double residual_A = 0.0;
    double residual_MA = 0.0;
    double residual_Aprime = 0.0;
    double residual_jordan = 0.0;
};

struct StabilityReport {
    /// Frequencies Omega >= 0 of the pairs +-i Omega, ascending; zero modes are exactly 0.
    std::vector<double> omegas;
    Index zero_frequencies = 0;
    /// Zero eigenvalue of calM^{-1} calL: dim ker calL and the stabilized dim ker (calM^{-1} calL)^k.
    Index geometric_multiplicity = 0;
    Index algebraic_multiplicity = 0;
    Index jordan_partners = 0;
    /// Any eigenvalue Omega^2 of M^{-1}L-M^{-1}L+ off the nonnegative real axis.
    bool unstable = false;
    double max_imag_part = 0.0;
    double min_real_part = 0.0;
    std::optional<GroundZeroModes> ground;
};

/// Eigenvalues of P = M^{-1} L- M^{-1} L+ (= Omega^2) plus zero-mode/Jordan analysis.
StabilityReport stability_spectrum(const OperatorPair& ops);

/// Closed-form frequency tables (ascending, length N) for comparison.
std::vector<double> ground_frequencies(Index n);
std::vector<double> single_mode_frequencies(Index mode, double c, Index n);

struct CommutatorReport {
    double max_LL = 0.0;    ///< [L+, L-]
    double max_MLML = 0.0;  ///< [M^{-1}L+, M^{-1}L-]
};

/// Max absolute entry of both commutators over the leading inner x inner block.
CommutatorReport commutators(const OperatorPair& ops, Index inner);

struct LadderReport {
    /// Relative residuals of (2T-M)S a = S(2T-M-I)a and (2T-M)S* a = S*(2T-M+I)a on
    /// test vectors of [X_0]^perp, measured on the leading half block.
    double raising_residual = 0.0;
    double lowering_residual = 0.0;
    /// ||(2T-M) v^(m) + m v^(m)|| / ||v^(m)|| for m = 1..m_max with v^(m) = S^{m-1} v^(1).
    std::vector<double> eigen_residuals;
    /// Angle between S* v^(1) and A'(p), and ||S* v^(1) - (1-p^2)A'(p)|| / ||(1-p^2)A'||.
    double angle_to_derivative = 0.0;
    double scale_mismatch = 0.0;
    Eigen::VectorXd v1;
};

/// T(p)_{nj} = p^{|n-j|} - p^{n+j+2}.
Eigen::MatrixXd toeplitz_T(double p, Index n);

/// Eigenvector of 2T - M for eigenvalue -1, closed form.
Eigen::VectorXd first_ladder_vector(double p, Index n);

LadderReport ladder_check(double p, Index n, int m_max = 10);

struct MuLadderReport {
    /// ||T v^(m) - M v^(m)/(m+1)|| / ||M v^(m)|| for m = 0..m_max.
    std::vector<double> residuals;
    /// max_j |<M^{j+1} A, v^(m)>| / (||M^{j+1}A|| ||v^(m)||) for m >= 1.
    std::vector<double> orthogonality;
    /// Relative errors of the closed-form m = 1, 2 coefficients (NaN at p = 0).
    double m1_coefficient_error = 0.0;
    double m2_coefficient_error = 0.0;
    std::vector<Eigen::VectorXd> vectors;
};

/// Eigenvectors of T v = mu M v with mu_m = 1/(m+1): v^(m) = q_m(M) A(p), where q_m is
/// the monic polynomial with <M^{j+1}A, q_m(M)A> = 0 for j < m (Stieltjes recurrence).
MuLadderReport mu_ladder(double p, int m_max, Index n);

struct CoercivityReport {
    double c_plus = 0.0;
    double c_minus = 0.0;
    /// <L+^{-1} M A, M A> on the solvable subspace.
    double inverse_form = 0.0;
};

/// Largest eigenvalue of W^{-1/2} Pi L+- Pi W^{-1/2} on {a : <MA,a> = <MA',a> = 0}, W = M.
/// Requires a ground-state OperatorPair.
CoercivityReport coercivity(const OperatorPair& ops);

struct IdentityCheck {
    std::string name;
    double max_rel_error = 0.0;
    long cases = 0;
    bool exact = false;  ///< integer identity checked in exact arithmetic
};

struct SeriesIdentityReport {
    std::vector<IdentityCheck> checks;
    double max_rel_error = 0.0;
    bool integer_identities_exact = true;
};

/// Geometric-series and kernel-sum identities, closed forms against direct sums, n, j <= n_max.
SeriesIdentityReport series_identities(double p, int n_max);

struct ModeEnergyReport {
    double derivative_charge_overlap = 0.0;  ///< <MA', A>, expected 0
    double derivative_mode_overlap = 0.0;    ///< <MA', MA>
    double overlap_closed_form = 0.0;        ///< 2p/(1-p^2)^2
    double series_value = 0.0;               ///< sum (n+1)^2 p^{2n} [n(1-p^2) - 2p^2]
    double series_closed_form = 0.0;         ///< 2p^2/(1-p^2)^3
};

ModeEnergyReport mode_energy_relation(double p, Index n);

struct OperatorIdentityReport {
    double Lminus_A = 0.0;        ///< ||L- A||_{h1}
    double Lminus_MA = 0.0;       ///< ||L- M A||_{h1}
    double Lplus_Aprime = 0.0;    ///< ||L+ A'||_{h1}
    double Lplus_A = 0.0;         ///< ||L+ A - 2 M A||_{h1}
    double Lplus_MA = 0.0;        ///< ||L+ M A - lambda_*(p) M A||_{h1}
    double max() const;
};

OperatorIdentityReport ground_operator_identities(double p, Index n);

/// lambda_*(p) = 2(1+p^2)/(1-p^2).
double positive_eigenvalue(double p);

/// K(A + a + ib) - K(A) - <L+ a, a> - <L- b, b> for a real reference A.
double second_variation_residual(const OperatorPair& ops, const Eigen::VectorXd& reference, double lambda,
                                 const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace cflow
