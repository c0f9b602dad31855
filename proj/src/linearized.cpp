#include "cflow/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "cflow/errors.hpp"
#include "cflow/observables.hpp"

namespace cflow {

namespace {

Eigen::VectorXd weight_vector(Index n) {
    return Eigen::VectorXd::LinSpaced(n, 1.0, static_cast<double>(n));
}

double h1_norm(const Eigen::VectorXd& v) {
    return (v.array() * weight_vector(v.size()).array()).matrix().norm();
}

// Number of singular values below tol * sigma_max.
Index nullity(const Eigen::MatrixXd& a, double rel_tol) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0;
    const double cut = rel_tol * std::max(1.0, s(0));
    Index k = 0;
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) <= cut) ++k;
    return k + (a.cols() - s.size());
}

const Ground* as_ground(const OperatorPair& ops) { return std::get_if<Ground>(&ops.about.kind); }

}  // namespace

double positive_eigenvalue(double p) { return 2.0 * (1.0 + p * p) / (1.0 - p * p); }

OperatorPair build_ground_ops(double p, Index n, double tail_tol) {
    require_ground_parameter(p);
    if (n < 2) throw ValidationError("build_ground_ops: truncation must be at least 2");
    if (std::pow(p, static_cast<double>(n)) > tail_tol)
        std::clog << "cflow: warning: p^N = " << std::pow(p, static_cast<double>(n)) << " exceeds tail tolerance "
                  << tail_tol << " (p = " << p << ", N = " << n << ")\n";

    const double q = 1.0 - p * p;
    Eigen::VectorXd u(n), w(n), pw(n);
    for (Index k = 0; k < n; ++k) {
        pw(k) = ipow(p, k);
        u(k) = pw(k);
        w(k) = q * static_cast<double>(k + 1) * pw(k);
    }

    OperatorPair ops;
    ops.about = ReferenceState::ground(p);
    ops.M = weight_vector(n);
    ops.Lplus.resize(n, n);
    ops.Lminus.resize(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i <= j; ++i) {
            const double toeplitz = 2.0 * pw(j - i) - 2.0 * p * p * u(i) * u(j);
            const double rank_one = w(i) * w(j);
            ops.Lplus(i, j) = ops.Lplus(j, i) = toeplitz + rank_one;
            ops.Lminus(i, j) = ops.Lminus(j, i) = toeplitz - rank_one;
        }
    }
    ops.Lplus.diagonal() -= ops.M;
    ops.Lminus.diagonal() -= ops.M;
    return ops;
}

OperatorPair build_single_mode_ops(Index mode, double c, Index n) {
    if (mode < 0) throw ValidationError("build_single_mode_ops: mode must be nonnegative");
    if (n <= 2 * mode)
        throw ValidationError("build_single_mode_ops: truncation must exceed twice the mode index");
    const double c2 = c * c;
    OperatorPair ops;
    ops.about = ReferenceState::single_mode(mode, c);
    ops.M = weight_vector(n);
    ops.Lplus = Eigen::MatrixXd::Zero(n, n);
    for (Index k = 0; k < n; ++k) ops.Lplus(k, k) = c2 * static_cast<double>(2 * std::min(k, mode) + 1 - k);
    ops.Lminus = ops.Lplus;
    for (Index k = 0; k <= 2 * mode; ++k) {
        const Index r = 2 * mode - k;
        const double coupling = c2 * static_cast<double>(std::min({k, mode, r}) + 1);
        ops.Lplus(k, r) += coupling;
        ops.Lminus(k, r) -= coupling;
    }
    return ops;
}

SpectralReport spectrum(const OperatorPair& ops, Which which) {
    const Eigen::MatrixXd& L = which == Which::plus ? ops.Lplus : ops.Lminus;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    if (es.info() != Eigen::Success)
        throw NumericalError("spectrum: symmetric eigensolver did not converge for " + ops.about.describe() +
                             " at N = " + std::to_string(ops.size()));
    const Index n = L.rows();
    SpectralReport rep;
    rep.which = which;
    rep.about = ops.about.describe();
    rep.truncation = n;
    rep.eigenvalues = es.eigenvalues().reverse();
    rep.eigenvectors = es.eigenvectors().rowwise().reverse();
    rep.operator_norm = rep.eigenvalues.cwiseAbs().maxCoeff();
    rep.zero_tol = 1e-8 * std::max(1.0, rep.operator_norm);
    rep.residuals.resize(n);
    for (Index k = 0; k < n; ++k) {
        const auto v = rep.eigenvectors.col(k);
        rep.residuals(k) = (L * v - rep.eigenvalues(k) * v).norm();
        if (std::abs(rep.eigenvalues(k)) <= rep.zero_tol) ++rep.zero_modes;
    }
    return rep;
}

StabilityReport stability_spectrum(const OperatorPair& ops) {
    const Index n = ops.size();
    const Eigen::VectorXd minv = ops.M.cwiseInverse();
    const Eigen::MatrixXd P = minv.asDiagonal() * ops.Lminus * minv.asDiagonal() * ops.Lplus;

    Eigen::EigenSolver<Eigen::MatrixXd> es(P, false);
    if (es.info() != Eigen::Success)
        throw NumericalError("stability_spectrum: eigensolver did not converge for " + ops.about.describe());
    const Eigen::VectorXcd ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    const double zero_tol = 1e-9 * scale;

    StabilityReport rep;
    rep.min_real_part = ev.real().minCoeff();
    rep.omegas.reserve(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) {
        const cplx z = ev(k);
        rep.max_imag_part = std::max(rep.max_imag_part, std::abs(z.imag()));
        if (std::abs(z) <= zero_tol) {
            rep.omegas.push_back(0.0);
            ++rep.zero_frequencies;
            continue;
        }
        if (z.real() < 0.0 || std::abs(z.imag()) > 1e-8 * scale) rep.unstable = true;
        rep.omegas.push_back(std::sqrt(std::max(0.0, z.real())));
    }
    std::sort(rep.omegas.begin(), rep.omegas.end());

    // calL = [[0, L-], [-L+, 0]], X = calM^{-1} calL.
    Eigen::MatrixXd calL = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    calL.topRightCorner(n, n) = ops.Lminus;
    calL.bottomLeftCorner(n, n) = -ops.Lplus;
    constexpr double kRankTol = 1e-9;
    rep.geometric_multiplicity = nullity(calL, kRankTol);

    Eigen::VectorXd minv2(2 * n);
    minv2 << minv, minv;
    const Eigen::MatrixXd X = minv2.asDiagonal() * calL;
    Eigen::MatrixXd power = X;
    Index previous = rep.geometric_multiplicity;
    for (int k = 2; k <= 2 * n; ++k) {
        power = power * X;
        const Index current = nullity(power, kRankTol);
        if (current <= previous) break;
        previous = current;
    }
    rep.algebraic_multiplicity = previous;
    rep.jordan_partners = rep.algebraic_multiplicity - rep.geometric_multiplicity;

    if (const Ground* g = as_ground(ops); g != nullptr) {
        const Eigen::VectorXd A = ground_amplitudes(g->p, n);
        const Eigen::VectorXd Ap = ground_derivative(g->p, n);
        const Eigen::VectorXd MA = ops.M.cwiseProduct(A);
        GroundZeroModes z;
        z.residual_A = (ops.Lminus * A).norm();
        z.residual_MA = (ops.Lminus * MA).norm();
        z.residual_Aprime = (ops.Lplus * Ap).norm();
        // calL (-A/2, 0) = (0, L+ A / 2) must equal calM (0, A) = (0, MA).
        z.residual_jordan = (0.5 * (ops.Lplus * A) - MA).norm();
        rep.ground = z;
    }
    return rep;
}

std::vector<double> ground_frequencies(Index n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    // Two zero modes (m = 0 and the Jordan block) and Omega_m = (m-1)/(m+1) for m >= 1.
    out.push_back(0.0);
    for (Index m = 1; m < n; ++m) out.push_back(static_cast<double>(m - 1) / static_cast<double>(m + 1));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> single_mode_frequencies(Index mode, double c, Index n) {
    const double c2 = c * c;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (Index k = 0; k < mode; ++k)
        out.push_back(c2 * 2.0 * static_cast<double>(mode - k) / static_cast<double>(2 * mode + 1 - k));
    for (Index k = 0; k <= mode; ++k) out.push_back(0.0);
    for (Index k = 2 * mode + 1; k < n; ++k)
        out.push_back(c2 * static_cast<double>(k - 2 * mode - 1) / static_cast<double>(k + 1));
    std::sort(out.begin(), out.end());
    return out;
}

CommutatorReport commutators(const OperatorPair& ops, Index inner) {
    if (inner <= 0 || inner > ops.size()) throw ValidationError("commutators: inner block out of range");
    const Eigen::VectorXd minv = ops.M.cwiseInverse();
    const Eigen::MatrixXd ll = ops.Lplus * ops.Lminus - ops.Lminus * ops.Lplus;
    const Eigen::MatrixXd a = minv.asDiagonal() * ops.Lplus;
    const Eigen::MatrixXd b = minv.asDiagonal() * ops.Lminus;
    const Eigen::MatrixXd mlml = a * b - b * a;
    return {ll.topLeftCorner(inner, inner).cwiseAbs().maxCoeff(),
            mlml.topLeftCorner(inner, inner).cwiseAbs().maxCoeff()};
}

OperatorIdentityReport ground_operator_identities(double p, Index n) {
    const OperatorPair ops = build_ground_ops(p, n);
    const Eigen::VectorXd A = ground_amplitudes(p, n);
    const Eigen::VectorXd Ap = ground_derivative(p, n);
    const Eigen::VectorXd MA = ops.M.cwiseProduct(A);
    OperatorIdentityReport r;
    r.Lminus_A = h1_norm(ops.Lminus * A);
    r.Lminus_MA = h1_norm(ops.Lminus * MA);
    r.Lplus_Aprime = h1_norm(ops.Lplus * Ap);
    r.Lplus_A = h1_norm(ops.Lplus * A - 2.0 * MA);
    r.Lplus_MA = h1_norm(ops.Lplus * MA - positive_eigenvalue(p) * MA);
    return r;
}

double OperatorIdentityReport::max() const {
    return std::max({Lminus_A, Lminus_MA, Lplus_Aprime, Lplus_A, Lplus_MA});
}

double second_variation_residual(const OperatorPair& ops, const Eigen::VectorXd& reference, double lambda,
                                 const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Index n = ops.size();
    if (reference.size() != n || a.size() != n || b.size() != n)
        throw ValidationError("second_variation_residual: dimension mismatch");
    Eigen::VectorXcd base = reference.cast<cplx>();
    Eigen::VectorXcd pert(n);
    for (Index k = 0; k < n; ++k) pert(k) = cplx(reference(k) + a(k), b(k));
    const double k0 = functional_K(ModeVector(base), lambda);
    const double k1 = functional_K(ModeVector(pert), lambda);
    return k1 - k0 - a.dot(ops.Lplus * a) - b.dot(ops.Lminus * b);
}

}  // namespace cflow
