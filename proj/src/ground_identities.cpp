// Closed-form facts about the ground-state operators: ladder structure,
// the mu-eigenproblem, constrained coercivity and the series identities
// behind the explicit matrix entries.
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "cflow/errors.hpp"
#include "cflow/kernel.hpp"
#include "cflow/linearized.hpp"
#include "cflow/summation.hpp"

namespace cflow {

namespace {

Eigen::VectorXd weights(Index n) { return Eigen::VectorXd::LinSpaced(n, 1.0, static_cast<double>(n)); }

Eigen::VectorXd shift_up(const Eigen::VectorXd& a) {  // S
    Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size());
    out.tail(a.size() - 1) = a.head(a.size() - 1);
    return out;
}

Eigen::VectorXd shift_down(const Eigen::VectorXd& a) {  // S*
    Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size());
    out.head(a.size() - 1) = a.tail(a.size() - 1);
    return out;
}

// Orthonormal basis (plain inner product) of the span of the given columns, rank-revealing.
Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& cols) {
    Eigen::MatrixXd basis(cols.rows(), 0);
    for (Index c = 0; c < cols.cols(); ++c) {
        Eigen::VectorXd v = cols.col(c);
        const double scale = v.norm();
        for (int pass = 0; pass < 2; ++pass) v -= basis * (basis.transpose() * v);
        if (v.norm() <= 1e-12 * std::max(1.0, scale)) continue;
        basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
        basis.col(basis.cols() - 1) = v.normalized();
    }
    return basis;
}

double rel_err(double value, double exact) {
    const double d = std::abs(value - exact);
    return exact == 0.0 ? d : d / std::abs(exact);
}

// Sums f(k) for k = k0, k0+1, ... until the terms drop below machine precision.
double tail_sum(long k0, const std::function<double(long)>& term) {
    detail::CompensatedSum s;
    long quiet = 0;
    for (long k = k0; k < k0 + 100000; ++k) {
        const double t = term(k);
        s.add(t);
        if (std::abs(t) <= 1e-18 * std::abs(s.value()))
            ++quiet;
        else
            quiet = 0;
        if (quiet > 4) break;
    }
    return s.value();
}

}  // namespace

Eigen::MatrixXd toeplitz_T(double p, Index n) {
    Eigen::MatrixXd T(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) T(i, j) = ipow(p, std::abs(i - j)) - ipow(p, i + j + 2);
    return T;
}

Eigen::VectorXd first_ladder_vector(double p, Index n) {
    const double q = 1.0 - p * p;
    Eigen::VectorXd v(n);
    for (Index k = 0; k < n; ++k) {
        if (k == 0)
            v(k) = p * p;
        else if (k == 1)
            v(k) = -2.0 * p * q;  // p^{-1} prefactor cancels
        else
            v(k) = q * (static_cast<double>(k) * q - (1.0 + p * p)) * ipow(p, k - 2);
    }
    return v;
}

LadderReport ladder_check(double p, Index n, int m_max) {
    require_ground_parameter(p);
    if (n < 16) throw ValidationError("ladder_check: truncation too small");
    const Eigen::VectorXd M = weights(n);
    const Eigen::MatrixXd K = 2.0 * toeplitz_T(p, n) - Eigen::MatrixXd(M.asDiagonal());
    const Index half = n / 2;

    Eigen::MatrixXd constraints(n, 2);
    const Eigen::VectorXd A = ground_amplitudes(p, n);
    constraints << A, M.cwiseProduct(A);
    const Eigen::MatrixXd Q = orthonormal_span(constraints);

    LadderReport rep;
    for (Index k : {0, 1, 2, 3, 5, 8}) {
        Eigen::VectorXd a = Eigen::VectorXd::Unit(n, k);
        a -= Q * (Q.transpose() * a);
        const Eigen::VectorXd up_l = K * shift_up(a);
        const Eigen::VectorXd up_r = shift_up(K * a - a);
        const Eigen::VectorXd dn_l = K * shift_down(a);
        const Eigen::VectorXd dn_r = shift_down(K * a + a);
        rep.raising_residual = std::max(
            rep.raising_residual, (up_l - up_r).head(half).norm() / std::max(1.0, up_r.head(half).norm()));
        rep.lowering_residual = std::max(
            rep.lowering_residual, (dn_l - dn_r).head(half).norm() / std::max(1.0, dn_r.head(half).norm()));
    }

    rep.v1 = first_ladder_vector(p, n);
    Eigen::VectorXd v = rep.v1;
    for (int m = 1; m <= m_max; ++m) {
        rep.eigen_residuals.push_back((K * v + m * v).norm() / v.norm());
        v = shift_up(v);
    }

    const Eigen::VectorXd lowered = shift_down(rep.v1);
    const Eigen::VectorXd target = (1.0 - p * p) * ground_derivative(p, n);
    const Eigen::VectorXd unit = target.normalized();
    const double along = std::abs(lowered.dot(unit));
    const double across = (lowered - lowered.dot(unit) * unit).norm();
    rep.angle_to_derivative = std::atan2(across, along);
    rep.scale_mismatch = (lowered - target).norm() / target.norm();
    return rep;
}

MuLadderReport mu_ladder(double p, int m_max, Index n) {
    require_ground_parameter(p);
    if (m_max < 0) throw ValidationError("mu_ladder: m_max must be nonnegative");
    if (n <= m_max + 1) throw ValidationError("mu_ladder: truncation too small for m_max");
    const Eigen::VectorXd M = weights(n);
    const Eigen::VectorXd A = ground_amplitudes(p, n);
    const Eigen::MatrixXd T = toeplitz_T(p, n);
    MuLadderReport rep;
    rep.m1_coefficient_error = std::numeric_limits<double>::quiet_NaN();
    rep.m2_coefficient_error = std::numeric_limits<double>::quiet_NaN();

    if (p == 0.0) {
        // Only n = 0 carries weight; the eigenvectors are the unit vectors.
        for (int m = 0; m <= m_max; ++m) rep.vectors.push_back(Eigen::VectorXd::Unit(n, m));
    } else {
        // Monic orthogonal polynomials in x = n+1 for the weight (n+1) A_n^2.
        const Eigen::ArrayXd w = M.array() * A.array().square();
        const Eigen::ArrayXd x = M.array();
        Eigen::ArrayXd q_prev = Eigen::ArrayXd::Zero(n);
        Eigen::ArrayXd q = Eigen::ArrayXd::Ones(n);
        double norm_prev = 1.0;
        std::vector<double> a_coef, b_coef;
        for (int m = 0; m <= m_max; ++m) {
            rep.vectors.push_back((q * A.array()).matrix());
            const double norm = (w * q.square()).sum();
            const double a = (w * x * q.square()).sum() / norm;
            const double b = m == 0 ? 0.0 : norm / norm_prev;
            a_coef.push_back(a);
            b_coef.push_back(b);
            Eigen::ArrayXd next = (x - a) * q - b * q_prev;
            q_prev = q;
            q = next;
            norm_prev = norm;
        }
        const double r = (1.0 + p * p) / (1.0 - p * p);
        const double s = (1.0 + p * p + p * p * p * p) / ((1.0 - p * p) * (1.0 - p * p));
        rep.m1_coefficient_error = rel_err(a_coef[0], r);
        if (m_max >= 1) {
            // q_2 = x^2 - (a0 + a1) x + (a0 a1 - b1) against x^2 - 3r x + 2s.
            const double lin = a_coef[0] + a_coef[1];
            const double cst = a_coef[0] * a_coef[1] - b_coef[1];
            rep.m2_coefficient_error = std::max(rel_err(lin, 3.0 * r), rel_err(cst, 2.0 * s));
        }
    }

    for (int m = 0; m <= m_max; ++m) {
        const Eigen::VectorXd& v = rep.vectors[static_cast<std::size_t>(m)];
        const Eigen::VectorXd Mv = M.cwiseProduct(v);
        rep.residuals.push_back((T * v - Mv / static_cast<double>(m + 1)).norm() / Mv.norm());
        if (m == 0) continue;
        double worst = 0.0;
        Eigen::VectorXd mj = A;
        for (int j = 0; j < m; ++j) {
            mj = M.cwiseProduct(mj);
            worst = std::max(worst, std::abs(mj.dot(v)) / (mj.norm() * v.norm()));
        }
        rep.orthogonality.push_back(worst);
    }
    return rep;
}

CoercivityReport coercivity(const OperatorPair& ops) {
    const auto* g = std::get_if<Ground>(&ops.about.kind);
    if (g == nullptr) throw ValidationError("coercivity: requires a ground-state operator pair");
    const Index n = ops.size();
    const Eigen::VectorXd A = ground_amplitudes(g->p, n);
    const Eigen::VectorXd Ap = ground_derivative(g->p, n);
    const Eigen::VectorXd sq = ops.M.cwiseSqrt();
    const Eigen::VectorXd isq = sq.cwiseInverse();

    // y = M^{1/2} a; the constraints read y _|_ M^{1/2} A, M^{1/2} A'.
    Eigen::MatrixXd c(n, 2);
    c << sq.cwiseProduct(A), sq.cwiseProduct(Ap);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
    const Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd Q = full.rightCols(n - 2);

    auto constrained_max = [&](const Eigen::MatrixXd& L) {
        const Eigen::MatrixXd scaled = isq.asDiagonal() * L * isq.asDiagonal();
        const Eigen::MatrixXd R = Q.transpose() * scaled * Q;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (R + R.transpose()), Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericalError("coercivity: eigensolver did not converge");
        return es.eigenvalues().maxCoeff();
    };

    CoercivityReport rep;
    rep.c_plus = constrained_max(ops.Lplus);
    rep.c_minus = constrained_max(ops.Lminus);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ops.Lplus);
    if (es.info() != Eigen::Success) throw NumericalError("coercivity: eigensolver did not converge");
    const Eigen::VectorXd MA = ops.M.cwiseProduct(A);
    const double tol = 1e-8 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    for (Index k = 0; k < n; ++k) {
        const double lam = es.eigenvalues()(k);
        if (std::abs(lam) <= tol) continue;
        const double proj = es.eigenvectors().col(k).dot(MA);
        rep.inverse_form += proj * proj / lam;
    }
    return rep;
}

SeriesIdentityReport series_identities(double p, int n_max) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("series_identities: p must lie in (0,1)");
    if (n_max < 0) throw ValidationError("series_identities: n_max must be nonnegative");
    const double q = 1.0 - p * p;
    SeriesIdentityReport rep;
    auto record = [&](IdentityCheck c) {
        rep.max_rel_error = std::max(rep.max_rel_error, c.max_rel_error);
        rep.checks.push_back(std::move(c));
    };

    {
        IdentityCheck c{"geometric-partial", 0.0, 0, false};
        IdentityCheck d{"weighted-geometric-partial", 0.0, 0, false};
        for (long n = 0; n <= n_max; ++n) {
            detail::CompensatedSum s0, s1;
            for (long k = 0; k <= n; ++k) {
                s0.add(std::pow(p, 2.0 * k));
                s1.add(static_cast<double>(k) * std::pow(p, 2.0 * k));
            }
            const double p2n = std::pow(p, 2.0 * n);
            c.max_rel_error = std::max(c.max_rel_error, rel_err(s0.value(), (1.0 - p2n * p * p) / q));
            d.max_rel_error = std::max(
                d.max_rel_error,
                rel_err(s1.value(), p * p * (1.0 - (n + 1) * p2n + n * p2n * p * p) / (q * q)));
            ++c.cases;
            ++d.cases;
        }
        record(c);
        record(d);
    }
    {
        IdentityCheck lower{"kernel-sum-lower", 0.0, 0, false};
        IdentityCheck lower_split{"kernel-sum-lower-split", 0.0, 0, false};
        IdentityCheck upper{"kernel-sum-upper", 0.0, 0, false};
        IdentityCheck upper_split{"kernel-sum-upper-split", 0.0, 0, false};
        IdentityCheck count{"kernel-count", 0.0, 0, true};
        for (long n = 0; n <= n_max; ++n) {
            for (long j = 0; j <= n_max; ++j) {
                auto term = [&](long k) {
                    return static_cast<double>(min_plus_one(n, k, j, n + k - j)) * std::pow(p, n + 2.0 * k - j);
                };
                const double closed = (std::pow(p, std::abs(n - j)) - std::pow(p, 2.0 + j + n)) / (q * q);
                if (j <= n) {
                    const double direct = tail_sum(0, term);
                    detail::CompensatedSum split;
                    for (long k = 0; k <= j; ++k) split.add((k + 1) * std::pow(p, n + 2.0 * k - j));
                    split.add(tail_sum(j + 1, [&](long k) { return (j + 1) * std::pow(p, n + 2.0 * k - j); }));
                    lower.max_rel_error = std::max(lower.max_rel_error, rel_err(direct, closed));
                    lower_split.max_rel_error = std::max(lower_split.max_rel_error, rel_err(split.value(), closed));
                    ++lower.cases;
                    ++lower_split.cases;
                }
                if (j >= n) {
                    const double direct = tail_sum(j - n, term);
                    detail::CompensatedSum split;
                    for (long k = j - n; k <= j; ++k) split.add((n + k - j + 1) * std::pow(p, n + 2.0 * k - j));
                    split.add(tail_sum(j + 1, [&](long k) { return (n + 1) * std::pow(p, n + 2.0 * k - j); }));
                    upper.max_rel_error = std::max(upper.max_rel_error, rel_err(direct, closed));
                    upper_split.max_rel_error = std::max(upper_split.max_rel_error, rel_err(split.value(), closed));
                    ++upper.cases;
                    ++upper_split.cases;

                    long total = 0;
                    for (long k = 0; k <= n + j; ++k) total += min_plus_one(n, j, k, n + j - k);
                    long pieces = 0;
                    for (long k = 0; k <= n; ++k) pieces += k + 1;
                    for (long k = n + 1; k <= j; ++k) pieces += n + 1;
                    for (long k = j + 1; k <= j + n; ++k) pieces += n + j - k + 1;
                    const long exact = (1 + j) * (1 + n);
                    if (total != exact || pieces != exact) {
                        count.max_rel_error = std::max(count.max_rel_error, 1.0);
                        rep.integer_identities_exact = false;
                    }
                    ++count.cases;
                }
            }
        }
        record(lower);
        record(lower_split);
        record(upper);
        record(upper_split);
        record(count);
    }
    {
        IdentityCheck first{"two-sided-geometric", 0.0, 0, false};
        IdentityCheck second{"two-sided-weighted-geometric", 0.0, 0, false};
        for (long n = 0; n <= n_max; ++n) {
            const double pn = std::pow(p, static_cast<double>(n));
            const double d0 = tail_sum(1, [&](long k) { return std::pow(p, k + std::abs(n - k)); });
            const double d1 =
                tail_sum(1, [&](long k) { return static_cast<double>(k) * std::pow(p, k + std::abs(n - k)); });
            const double c0 = (p * p + n * q) / q * pn;
            const double c1 = (2.0 * p * p + n * (1.0 - p * p * p * p) + static_cast<double>(n) * n * q * q) /
                              (2.0 * q * q) * pn;
            first.max_rel_error = std::max(first.max_rel_error, rel_err(d0, c0));
            second.max_rel_error = std::max(second.max_rel_error, rel_err(d1, c1));
            ++first.cases;
            ++second.cases;
        }
        record(first);
        record(second);
    }
    return rep;
}

ModeEnergyReport mode_energy_relation(double p, Index n) {
    require_ground_parameter(p);
    const Eigen::VectorXd M = weights(n);
    const Eigen::VectorXd A = ground_amplitudes(p, n);
    const Eigen::VectorXd MAp = M.cwiseProduct(ground_derivative(p, n));
    const double q = 1.0 - p * p;
    ModeEnergyReport rep;
    rep.derivative_charge_overlap = MAp.dot(A);
    rep.derivative_mode_overlap = MAp.dot(M.cwiseProduct(A));
    rep.overlap_closed_form = 2.0 * p / (q * q);
    detail::CompensatedSum s;
    for (Index k = 0; k < n; ++k)
        s.add(static_cast<double>((k + 1) * (k + 1)) * ipow(p, 2 * k) * (static_cast<double>(k) * q - 2.0 * p * p));
    rep.series_value = s.value();
    rep.series_closed_form = 2.0 * p * p / (q * q * q);
    return rep;
}

}  // namespace cflow
