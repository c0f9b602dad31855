#include "cflow/state.hpp"

#include <cmath>
#include <sstream>

#include "cflow/errors.hpp"

namespace cflow {

ModeVector ModeVector::delta(Index n_total, Index mode, cplx value) {
    ModeVector v(n_total);
    if (mode < 0 || mode >= n_total) throw ValidationError("delta: mode outside truncation");
    v[mode] = value;
    return v;
}

double ipow(double p, long k) {
    if (k < 0) return 0.0;
    double r = 1.0;
    double b = p;
    auto e = static_cast<unsigned long>(k);
    while (e) {
        if (e & 1UL) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

double weighted_norm(const ModeVector& alpha, WeightedNormOrder order) {
    double acc = 0.0;
    for (Index n = 0; n < alpha.size(); ++n) {
        const double w = order.s == 0.0 ? 1.0 : std::pow(double(n + 1), 2.0 * order.s);
        acc += w * std::norm(alpha[n]);
    }
    return std::sqrt(acc);
}

ModeVector gauge_apply(const ModeVector& alpha, double theta, double mu) {
    ModeVector out(alpha.size());
    for (Index n = 0; n < alpha.size(); ++n)
        out[n] = std::polar(1.0, theta + double(n) * mu) * alpha[n];
    return out;
}

ModeVector scaling_apply(const ModeVector& alpha, double c) {
    if (!(c > 0.0)) throw ValidationError("scaling_apply: c must be positive");
    return ModeVector(Eigen::VectorXcd(c * alpha.coeffs()));
}

void require_ground_parameter(double p) {
    if (!(p >= 0.0 && p < 1.0)) {
        std::ostringstream os;
        os << "ground state parameter p = " << p << " outside [0, 1)";
        throw ValidationError(os.str());
    }
}

double ReferenceState::lambda() const {
    if (const auto* s = std::get_if<SingleMode>(&kind)) return std::norm(s->c);
    const auto& g = std::get<Ground>(kind);
    const double q = 1.0 - g.p * g.p;
    return std::norm(g.c()) / (q * q);
}

std::string ReferenceState::describe() const {
    std::ostringstream os;
    if (const auto* s = std::get_if<SingleMode>(&kind))
        os << "single-mode(N=" << s->mode << ", c=" << s->c << ")";
    else
        os << "ground(p=" << std::get<Ground>(kind).p << ")";
    return os.str();
}

Eigen::VectorXd ground_amplitudes(double p, Index n_total) {
    require_ground_parameter(p);
    Eigen::VectorXd a(n_total);
    const double q = 1.0 - p * p;
    for (Index n = 0; n < n_total; ++n) a[n] = q * ipow(p, n);
    return a;
}

Eigen::VectorXd ground_derivative(double p, Index n_total) {
    require_ground_parameter(p);
    Eigen::VectorXd d(n_total);
    const double q = 1.0 - p * p;
    for (Index n = 0; n < n_total; ++n)
        d[n] = q * double(n) * ipow(p, n - 1) - 2.0 * ipow(p, n + 1);
    return d;
}

Eigen::VectorXd ground_second_derivative(double p, Index n_total) {
    require_ground_parameter(p);
    Eigen::VectorXd d(n_total);
    const double q = 1.0 - p * p;
    for (Index n = 0; n < n_total; ++n) {
        const double nd = double(n);
        d[n] = q * nd * (nd - 1.0) * ipow(p, n - 2) - 2.0 * (2.0 * nd + 1.0) * ipow(p, n);
    }
    return d;
}

double ground_tail_mass(double p, Index n_total) {
    require_ground_parameter(p);
    if (p == 0.0) return n_total > 0 ? 0.0 : 1.0;
    // sum_{n>=N} (n+1)^2 x^n with x = p^2, times (1-p^2)^2.
    const double x = p * p;
    const double nn = double(n_total);
    const double om = 1.0 - x;
    const double s = ipow(x, n_total) *
                     ((nn + 1.0) * (nn + 1.0) / om + (2.0 * nn + 3.0) * x / (om * om) +
                      2.0 * x * x / (om * om * om));
    return om * om * s;
}

Index truncation_for(double p, double tail_tol, Index n_min) {
    require_ground_parameter(p);
    if (p == 0.0) return n_min;
    const auto n = static_cast<Index>(std::ceil(std::log(tail_tol) / std::log(p)));
    return std::max(n_min, n);
}

TruncatedReference make_reference(const ReferenceState& ref, Index n_total) {
    if (n_total <= 0) throw ValidationError("make_reference: truncation must be positive");
    if (const auto* s = std::get_if<SingleMode>(&ref.kind)) {
        if (s->mode < 0 || s->mode >= n_total)
            throw ValidationError("make_reference: single mode outside truncation");
        return {ModeVector::delta(n_total, s->mode, s->c), ref.lambda(), 0.0};
    }
    const auto& g = std::get<Ground>(ref.kind);
    require_ground_parameter(g.p);
    const double q = 1.0 - g.p * g.p;
    const cplx rel = g.c() / q;  // relative to the normalized profile
    Eigen::VectorXcd amp = ground_amplitudes(g.p, n_total).cast<cplx>() * rel;
    return {ModeVector(std::move(amp)), ref.lambda(), std::norm(rel) * ground_tail_mass(g.p, n_total)};
}

}  // namespace cflow
