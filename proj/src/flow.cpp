#include "cflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "cflow/detail/dopri.hpp"
#include "cflow/errors.hpp"
#include "cflow/kernel.hpp"
#include "cflow/summation.hpp"

namespace cflow {

ModeVector vector_field_naive(const ModeVector& alpha) {
    const Index n_modes = alpha.size();
    ModeVector out(n_modes);
    for (Index n = 0; n < n_modes; ++n) {
        cplx acc{};
        for (Index j = 0; j < n_modes; ++j) {
            const Index s = n + j;
            const Index k_lo = std::max<Index>(0, s - (n_modes - 1));
            const Index k_hi = std::min<Index>(s, n_modes - 1);
            cplx inner{};
            for (Index k = k_lo; k <= k_hi; ++k)
                inner += double(min_plus_one(n, j, k, s - k)) * alpha[k] * alpha[s - k];
            acc += std::conj(alpha[j]) * inner;
        }
        out[n] = acc / double(n + 1);
    }
    return out;
}

ModeVector vector_field_fast(const ModeVector& alpha) {
    const Index n_modes = alpha.size();
    ModeVector out(n_modes);
    if (n_modes == 0) return out;
    const bool compensated = n_modes > detail::kCompensatedThreshold;

    const LayeredPairSums table = layered_pair_sums(alpha);
    // g[n] holds G_l(n); lag[d] holds sum_{j>l} conj(alpha_j) alpha_{j+d}.
    std::vector<cplx> g(static_cast<std::size_t>(n_modes));
    std::vector<cplx> lag(static_cast<std::size_t>(n_modes));
    std::vector<detail::Accumulator<cplx>> total(static_cast<std::size_t>(n_modes),
                                                 detail::Accumulator<cplx>(compensated));

    for (Index l = n_modes - 1; l >= 0; --l) {
        if (l + 1 < n_modes) {
            const cplx a_bar = std::conj(alpha[l + 1]);
            for (Index d = 1; l + 1 + d < n_modes; ++d) lag[d] += a_bar * alpha[l + 1 + d];
        }
        const cplx a_l = alpha[l];
        const cplx a_l_bar = std::conj(a_l);
        for (Index n = l + 1; n < n_modes; ++n) g[n] += a_l_bar * table(l, n + l) + 2.0 * a_l * lag[n - l];

        detail::Accumulator<cplx> head(compensated);
        for (Index j = l; j < n_modes; ++j) head.add(std::conj(alpha[j]) * table(l, l + j));
        g[l] = head.value();

        for (Index n = l; n < n_modes; ++n) total[n].add(g[n]);
    }
    for (Index n = 0; n < n_modes; ++n) out[n] = total[n].value() / double(n + 1);
    return out;
}

void IntegratorConfig::validate() const {
    auto bad = [](const char* what) { throw ValidationError(std::string("integrator config: ") + what); };
    if (!(rel_tol > 0.0)) bad("rel_tol must be positive");
    if (!(abs_tol > 0.0)) bad("abs_tol must be positive");
    if (!(sample_dt > 0.0)) bad("sample_dt must be positive");
    if (!(t_end > 0.0)) bad("t_end must be positive");
    if (!(max_step > 0.0)) bad("max_step must be positive");
    if (oracle_check_stride < 0) bad("oracle_check_stride must be nonnegative");
}

ConservedTriple TrajectoryRecord::max_relative_drift() const {
    ConservedTriple d;
    if (conserved.empty()) return d;
    const auto& c0 = conserved.front();
    auto rel = [](double x, double x0) { return x0 != 0.0 ? std::abs(x - x0) / std::abs(x0) : std::abs(x); };
    for (const auto& c : conserved) {
        d.H = std::max(d.H, rel(c.H, c0.H));
        d.Q = std::max(d.Q, rel(c.Q, c0.Q));
        d.E = std::max(d.E, rel(c.E, c0.E));
    }
    return d;
}

namespace {

std::vector<double> sample_times(double t_end, double dt) {
    std::vector<double> ts;
    const auto count = static_cast<long>(std::floor(t_end / dt * (1.0 + 1e-12)));
    ts.reserve(static_cast<std::size_t>(count + 2));
    for (long k = 0; k <= count; ++k) ts.push_back(std::min(double(k) * dt, t_end));
    if (t_end - ts.back() > 1e-12 * t_end) ts.push_back(t_end);
    return ts;
}

}  // namespace

TrajectoryRecord integrate(const ModeVector& alpha0, const IntegratorConfig& cfg) {
    cfg.validate();
    if (!alpha0.all_finite()) throw ValidationError("integrate: initial state has non-finite entries");
    const Index n_modes = alpha0.size();
    const cplx phase = cfg.reverse_time ? cplx(0.0, 1.0) : cplx(0.0, -1.0);

    auto rhs = [phase](const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
        dy = phase * vector_field_fast(ModeVector(y)).coeffs();
    };
    detail::DormandPrince<Eigen::VectorXcd, decltype(rhs)> stepper(rhs, cfg.rel_tol, cfg.abs_tol);

    TrajectoryRecord rec;
    rec.reverse_time = cfg.reverse_time;
    const std::vector<double> ts = sample_times(cfg.t_end, cfg.sample_dt);
    rec.times.reserve(ts.size());
    rec.states.reserve(ts.size());
    rec.conserved.reserve(ts.size());

    Eigen::VectorXcd y = alpha0.coeffs();
    auto record = [&](double t) {
        rec.times.push_back(t);
        rec.states.emplace_back(y);
        rec.conserved.push_back(conserved(rec.states.back()));
    };
    record(0.0);
    if (n_modes == 0) {
        for (std::size_t i = 1; i < ts.size(); ++i) record(ts[i]);
        return rec;
    }

    const double q0 = rec.conserved.front().Q;
    const bool oracle_on = cfg.oracle_check_stride > 0 && n_modes <= cfg.oracle_check_max_modes;
    if (cfg.renormalize_Q)
        std::clog << "[cflow] renormalize_Q active: states are projected onto Q = " << q0 << '\n';

    double t = 0.0;
    double h = stepper.initial_step(y, std::min(cfg.max_step, cfg.t_end));
    bool last_rejected = false;
    Eigen::VectorXcd y_new(n_modes);
    std::size_t next = 1;
    long steps = 0;

    while (next < ts.size()) {
        if (++steps > cfg.max_steps) {
            std::ostringstream os;
            os << "integrate: step budget exhausted at t = " << t;
            throw StepSizeUnderflow(t, os.str());
        }
        const double target = ts[next];
        const double remaining = target - t;
        const double h_try = std::min({h, cfg.max_step, remaining});
        const bool hits = h_try >= remaining;
        const double min_step = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        if (h_try < min_step && !hits) {
            std::ostringstream os;
            os << "integrate: step size underflow (h = " << h_try << ") at t = " << t;
            throw StepSizeUnderflow(t, os.str());
        }

        const double err = stepper.attempt(y, h_try, y_new);
        if (!y_new.allFinite()) {
            std::ostringstream os;
            os << "integrate: non-finite state after step from t = " << t;
            throw NonFiniteState(t, os.str());
        }
        if (err <= 1.0) {
            t = hits ? target : t + h_try;
            y.swap(y_new);
            stepper.accept();
            ++rec.stats.accepted;

            if (cfg.renormalize_Q && q0 > 0.0) {
                const double q = charge(ModeVector(y));
                y *= std::sqrt(q0 / q);
                stepper.invalidate();
                ++rec.stats.renormalizations;
            }
            if (oracle_on && rec.stats.accepted % cfg.oracle_check_stride == 0) {
                const ModeVector state(y);
                const ModeVector fast = vector_field_fast(state);
                const ModeVector slow = vector_field_naive(state);
                const double scale = std::max(weighted_norm(slow, kH1), 1e-300);
                const double dev =
                    weighted_norm(ModeVector(Eigen::VectorXcd(fast.coeffs() - slow.coeffs())), kH1) / scale;
                ++rec.stats.oracle_checks;
                rec.stats.max_oracle_deviation = std::max(rec.stats.max_oracle_deviation, dev);
                if (dev > 1e-10) {
                    std::ostringstream os;
                    os << "integrate: fast/naive vector field mismatch " << dev << " at t = " << t;
                    throw NumericalError(os.str());
                }
            }
            if (hits) {
                record(t);
                ++next;
            }
            const double proposal = detail::DormandPrince<Eigen::VectorXcd, decltype(rhs)>::propose(
                h_try, err, last_rejected);
            h = (hits && h_try < h) ? std::max(h, proposal) : proposal;
            last_rejected = false;
        } else {
            ++rec.stats.rejected;
            h = detail::DormandPrince<Eigen::VectorXcd, decltype(rhs)>::propose(h_try, err, true);
            last_rejected = true;
        }
    }
    rec.stats.rhs_evaluations = stepper.evaluations();
    return rec;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> linearized_rhs(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                                           const OperatorPair& ops) {
    if (a.size() != ops.size() || b.size() != ops.size())
        throw ValidationError("linearized_rhs: sequence length does not match the operators");
    Eigen::VectorXd da = (ops.Lminus * b).cwiseQuotient(ops.M);
    Eigen::VectorXd db = -(ops.Lplus * a).cwiseQuotient(ops.M);
    return {std::move(da), std::move(db)};
}

LinearizedSolution integrate_linearized(const Eigen::VectorXd& a0, const Eigen::VectorXd& b0,
                                        const OperatorPair& ops, double t_end, double rel_tol,
                                        double abs_tol) {
    const Index n = ops.size();
    if (a0.size() != n || b0.size() != n)
        throw ValidationError("integrate_linearized: sequence length does not match the operators");
    if (!(t_end > 0.0)) throw ValidationError("integrate_linearized: t_end must be positive");

    auto rhs = [&ops, n](const Eigen::VectorXd& z, Eigen::VectorXd& dz) {
        dz.resize(2 * n);
        auto [da, db] = linearized_rhs(z.head(n), z.tail(n), ops);
        dz.head(n) = da;
        dz.tail(n) = db;
    };
    using Engine = detail::DormandPrince<Eigen::VectorXd, decltype(rhs)>;
    Engine stepper(rhs, rel_tol, abs_tol);

    Eigen::VectorXd z(2 * n);
    z << a0, b0;
    Eigen::VectorXd z_new(2 * n);
    double t = 0.0;
    double h = stepper.initial_step(z, t_end);
    bool last_rejected = false;
    LinearizedSolution out;
    while (t < t_end) {
        const double h_try = std::min(h, t_end - t);
        const bool hits = h_try >= t_end - t;
        const double err = stepper.attempt(z, h_try, z_new);
        if (!z_new.allFinite()) throw NonFiniteState(t, "integrate_linearized: non-finite state");
        if (err <= 1.0) {
            t = hits ? t_end : t + h_try;
            z.swap(z_new);
            stepper.accept();
            ++out.steps;
            h = Engine::propose(h_try, err, last_rejected);
            last_rejected = false;
        } else {
            h = Engine::propose(h_try, err, true);
            last_rejected = true;
            if (h < 1e-14 * std::max(1.0, t)) throw StepSizeUnderflow(t, "integrate_linearized: step size underflow");
        }
    }
    out.a = z.head(n);
    out.b = z.tail(n);
    return out;
}

}  // namespace cflow
