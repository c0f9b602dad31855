#include "cflow/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include <boost/math/tools/roots.hpp>

#include "cflow/errors.hpp"
#include "cflow/observables.hpp"

namespace cflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Slack on the neighbourhood test so that boundary cases such as 1.1 A(0) at delta0 = 0.1 pass.
constexpr double kNeighbourhoodSlack = 1e-9;

double wrap_angle(double x) { return std::remainder(x, kTwoPi); }

Eigen::VectorXd weights(Index n) { return Eigen::VectorXd::LinSpaced(n, 1.0, static_cast<double>(n)); }

// beta_n = e^{-i(theta + mu(n+1))} alpha_n
Eigen::VectorXcd rotate_back(const ModeVector& alpha, double theta, double mu) {
    const Index n = alpha.size();
    Eigen::VectorXcd beta(n);
    for (Index k = 0; k < n; ++k) beta(k) = alpha[k] * std::polar(1.0, -(theta + mu * static_cast<double>(k + 1)));
    return beta;
}

void require_neighbourhood(const ModeVector& alpha, double p, double delta0) {
    const double d = orbit_distance(alpha, p, kL2).distance;
    if (d > delta0 * (1.0 + kNeighbourhoodSlack)) {
        std::ostringstream os;
        os << "decompose: state is at l2 distance " << d << " from the orbit of A(" << p
           << "), outside the neighbourhood delta0 = " << delta0;
        throw NoConvergence(os.str());
    }
}

std::string describe_history(const std::vector<double>& r) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? ", " : "") << r[i];
    os << "]";
    return os.str();
}

ModulationFrame newton_p0(const ModeVector& alpha, double c, double theta, const DecomposeOptions& opts) {
    if (alpha.size() < 1) throw ValidationError("decompose_p0: empty state");
    const cplx a0 = alpha[0];
    ModulationFrame f;
    f.p = 0.0;
    f.mu = 0.0;
    f.mu_determinate = false;
    double res = 0.0;
    for (int it = 0;; ++it) {
        const cplx r = a0 * std::polar(1.0, -theta);
        const Eigen::Vector2d F(r.real() - c, r.imag());
        res = F.cwiseAbs().maxCoeff();
        f.newton_residuals.push_back(res);
        if (res <= opts.tolerance) break;
        if (it >= opts.max_iterations) {
            if (res <= opts.acceptance) break;
            throw NoConvergence("decompose_p0: Newton did not converge, residuals " +
                                describe_history(f.newton_residuals));
        }
        Eigen::Matrix2d J;
        J << -1.0, r.imag(), 0.0, -r.real();
        if (std::abs(J.determinant()) < 1e-14)
            throw NoConvergence("decompose_p0: singular Jacobian (alpha_0 vanishes)");
        const Eigen::Vector2d dx = -J.partialPivLu().solve(F);
        c += dx(0);
        theta += dx(1);
        f.iterations = it + 1;
    }
    f.c = c;
    f.theta = wrap_angle(theta);
    const Eigen::VectorXcd beta = rotate_back(alpha, f.theta, 0.0);
    f.a = beta.real();
    f.b = beta.imag();
    f.a(0) -= f.c;
    f.constraint_residual = std::max(std::abs(f.a(0)), std::abs(f.b(0)));
    if (f.c <= 0.0) throw NoConvergence("decompose_p0: nonpositive amplitude");
    return f;
}

ModulationFrame newton_full(const ModeVector& alpha, double c, double p, double theta, double mu,
                            const DecomposeOptions& opts) {
    const Index n = alpha.size();
    const Eigen::VectorXd M = weights(n);
    const double scale = std::max(1.0, weighted_norm(alpha, kH1));
    const double tol = opts.tolerance * scale * scale;
    ModulationFrame f;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0;; ++it) {
        const Eigen::VectorXd A = ground_amplitudes(p, n);
        const Eigen::VectorXd A1 = ground_derivative(p, n);
        const Eigen::VectorXd A2 = ground_second_derivative(p, n);
        const Eigen::VectorXd MA = M.cwiseProduct(A), MA1 = M.cwiseProduct(A1), MA2 = M.cwiseProduct(A2);
        const Eigen::VectorXd MMA = M.cwiseProduct(MA), MMA1 = M.cwiseProduct(MA1);
        const Eigen::VectorXcd beta = rotate_back(alpha, theta, mu);
        const Eigen::VectorXd R = beta.real(), I = beta.imag();
        const Eigen::VectorXd a = R - c * A;

        const Eigen::Vector4d F(MA.dot(a), MA1.dot(a), MA.dot(I), MA1.dot(I));
        const double res = F.cwiseAbs().maxCoeff();
        f.newton_residuals.push_back(res);
        const bool stalled = it > 0 && res >= 0.5 * prev && res <= opts.acceptance * scale * scale;
        if (res <= tol || stalled) break;
        if (it >= opts.max_iterations) {
            if (res <= opts.acceptance * scale * scale) break;
            throw NoConvergence("decompose: Newton did not converge after " + std::to_string(it) +
                                " iterations, constraint residuals " + describe_history(f.newton_residuals));
        }
        prev = res;

        Eigen::Matrix4d J;
        J << -MA.dot(A), MA1.dot(a) - c * MA.dot(A1), MA.dot(I), MMA.dot(I),
             -MA1.dot(A), MA2.dot(a) - c * MA1.dot(A1), MA1.dot(I), MMA1.dot(I),
             0.0, MA1.dot(I), -MA.dot(R), -MMA.dot(R),
             0.0, MA2.dot(I), -MA1.dot(R), -MMA1.dot(R);
        Eigen::JacobiSVD<Eigen::Matrix4d> svd(J);
        const auto& sv = svd.singularValues();
        if (!(sv(3) > 1e-12 * sv(0))) {
            std::ostringstream os;
            os << "decompose: modulation Jacobian is degenerate at p = " << p << " (singular values " << sv.transpose()
               << ")";
            throw DegenerateJacobian(os.str());
        }
        const Eigen::Vector4d dx = -J.fullPivLu().solve(F);
        c += dx(0);
        p = std::clamp(p + dx(1), 0.0, 1.0 - 1e-9);
        theta += dx(2);
        mu += dx(3);
        f.iterations = it + 1;
        if (p < opts.p_switch) return decompose_p0(alpha, opts);
    }
    if (!(c > 0.0)) throw NoConvergence("decompose: Newton produced a nonpositive amplitude");

    f.c = c;
    f.p = p;
    f.theta = wrap_angle(theta);
    f.mu = wrap_angle(mu);
    const Eigen::VectorXd A = ground_amplitudes(p, n);
    const Eigen::VectorXcd beta = rotate_back(alpha, f.theta, f.mu);
    f.a = beta.real() - c * A;
    f.b = beta.imag();
    const Eigen::VectorXd MA = M.cwiseProduct(A), MA1 = M.cwiseProduct(ground_derivative(p, n));
    f.constraint_residual = std::max({std::abs(MA.dot(f.a)), std::abs(MA1.dot(f.a)), std::abs(MA.dot(f.b)),
                                      std::abs(MA1.dot(f.b))});
    return f;
}

}  // namespace

ModeVector ModulationFrame::reconstruct() const {
    const Index n = a.size();
    const Eigen::VectorXd A = ground_amplitudes(p, n);
    ModeVector out(n);
    for (Index k = 0; k < n; ++k)
        out[k] = std::polar(1.0, theta + mu + mu * static_cast<double>(k)) * cplx(c * A(k) + a(k), b(k));
    return out;
}

double energy_budget(const ModulationFrame& f) {
    const Eigen::VectorXd M = weights(f.a.size());
    const double p2 = f.p * f.p;
    return f.c * f.c * (1.0 + p2) / (1.0 - p2) + M.cwiseProduct(f.a).squaredNorm() + M.cwiseProduct(f.b).squaredNorm();
}

ModulationFrame decompose_p0(const ModeVector& alpha, const DecomposeOptions& opts) {
    require_neighbourhood(alpha, 0.0, opts.delta0);
    return newton_p0(alpha, 1.0, orbit_distance(alpha, 0.0, kL2).theta, opts);
}

ModulationFrame decompose(const ModeVector& alpha, double p_init, const DecomposeOptions& opts) {
    require_ground_parameter(p_init);
    if (p_init < opts.p_switch) return decompose_p0(alpha, opts);
    require_neighbourhood(alpha, p_init, opts.delta0);
    const OrbitDistanceResult seed = orbit_distance(alpha, p_init, kHHalf);
    const double theta = seed.theta - seed.mu;
    const Index n = alpha.size();
    const Eigen::VectorXd A = ground_amplitudes(p_init, n);
    const Eigen::VectorXd MA = weights(n).cwiseProduct(A);
    const double c = MA.dot(rotate_back(alpha, theta, seed.mu).real()) / MA.dot(A);
    return newton_full(alpha, c > 0.0 ? c : 1.0, p_init, theta, seed.mu, opts);
}

ModulationFrame decompose(const ModeVector& alpha, const ModulationFrame& seed, const DecomposeOptions& opts) {
    if (seed.p < opts.p_switch) return newton_p0(alpha, seed.c, seed.theta, opts);
    return newton_full(alpha, seed.c, seed.p, seed.theta, seed.mu, opts);
}

OrbitDistanceResult orbit_distance(const ModeVector& alpha, double p, WeightedNormOrder s) {
    require_ground_parameter(p);
    const Index n = alpha.size();
    const Eigen::VectorXd A = ground_amplitudes(p, n);
    Eigen::VectorXcd coef(n);  // w_n alpha_n A_n
    for (Index k = 0; k < n; ++k) coef(k) = std::pow(static_cast<double>(k + 1), 2.0 * s.s) * alpha[k] * A(k);

    auto h_and_derivs = [&](double mu) {
        cplx h{}, h1{}, h2{};
        for (Index k = 0; k < n; ++k) {
            const double dk = static_cast<double>(k);
            const cplx t = coef(k) * std::polar(1.0, -mu * dk);
            h += t;
            h1 += cplx(0.0, -dk) * t;
            h2 += -dk * dk * t;
        }
        return std::make_tuple(h, h1, h2);
    };

    const Index grid = std::max<Index>(64, 8 * n);
    const double step = kTwoPi / static_cast<double>(grid);
    double best_mu = 0.0, best = -1.0;
    for (Index g = 0; g < grid; ++g) {
        const double mu = step * static_cast<double>(g);
        const double v = std::norm(std::get<0>(h_and_derivs(mu)));
        if (v > best) {
            best = v;
            best_mu = mu;
        }
    }

    // Stationary point of |h|^2: g' = 2 Re(conj(h) h'), g'' = 2(|h'|^2 + Re(conj(h) h'')).
    if (n > 1 && p > 0.0) {
        auto dg = [&](double mu) {
            const auto [h, h1, h2] = h_and_derivs(mu);
            return std::make_pair(2.0 * std::real(std::conj(h) * h1),
                                  2.0 * (std::norm(h1) + std::real(std::conj(h) * h2)));
        };
        std::uintmax_t max_iter = 100;
        const double refined = boost::math::tools::newton_raphson_iterate(
            dg, best_mu, best_mu - step, best_mu + step, std::numeric_limits<double>::digits - 8, max_iter);
        if (std::norm(std::get<0>(h_and_derivs(refined))) >= best) best_mu = refined;
    }

    const cplx h = std::get<0>(h_and_derivs(best_mu));
    OrbitDistanceResult r;
    r.order = s;
    r.mu = wrap_angle(best_mu);
    r.theta = std::abs(h) > 0.0 ? std::arg(h) : 0.0;
    ModeVector orbit_point(n);
    for (Index k = 0; k < n; ++k) orbit_point[k] = std::polar(A(k), r.theta + r.mu * static_cast<double>(k));
    ModeVector diff(n);
    diff.coeffs() = alpha.coeffs() - orbit_point.coeffs();
    r.distance = weighted_norm(diff, s);
    return r;
}

namespace {
std::string where(std::size_t i, double t) {
    return "track_modulation: sample " + std::to_string(i) + " (t = " + std::to_string(t) + "): ";
}
}  // namespace

ModulationTrack track_modulation(const TrajectoryRecord& traj, double p_init, const DecomposeOptions& opts) {
    ModulationTrack track;
    track.p_init = p_init;
    if (traj.samples() == 0) return track;
    track.E0 = higher_charge(traj.states.front());
    std::optional<ModulationFrame> prev;
    for (std::size_t i = 0; i < traj.samples(); ++i) {
        const ModeVector& alpha = traj.states[i];
        ModulationSample s;
        s.t = traj.times[i];
        try {
            s.frame = prev ? decompose(alpha, *prev, opts) : decompose(alpha, p_init, opts);
        } catch (const NoConvergence& e) {
            throw NoConvergence(where(i, s.t) + e.what());
        } catch (const DegenerateJacobian& e) {
            throw DegenerateJacobian(where(i, s.t) + e.what());
        }
        s.dist_h12 = orbit_distance(alpha, s.frame.p, kHHalf).distance;
        s.dist_h1 = orbit_distance(alpha, s.frame.p, kH1).distance;
        s.budget_error = std::abs(energy_budget(s.frame) - track.E0);
        prev = s.frame;
        track.samples.push_back(std::move(s));
    }
    return track;
}

namespace {
template <typename F>
double reduce(const std::vector<ModulationSample>& s, double init, F f) {
    double v = init;
    for (const auto& x : s) v = f(v, x);
    return v;
}
}  // namespace

double ModulationTrack::sup_dist_h12() const {
    return reduce(samples, 0.0, [](double v, const ModulationSample& s) { return std::max(v, s.dist_h12); });
}
double ModulationTrack::sup_dist_h1() const {
    return reduce(samples, 0.0, [](double v, const ModulationSample& s) { return std::max(v, s.dist_h1); });
}
double ModulationTrack::min_p() const {
    return reduce(samples, p_init, [](double v, const ModulationSample& s) { return std::min(v, s.frame.p); });
}
double ModulationTrack::max_p_drop() const {
    return reduce(samples, 0.0,
                  [this](double v, const ModulationSample& s) { return std::max(v, p_init - s.frame.p); });
}
double ModulationTrack::max_budget_error() const {
    return reduce(samples, 0.0, [](double v, const ModulationSample& s) { return std::max(v, s.budget_error); });
}
double ModulationTrack::max_constraint_residual() const {
    return reduce(samples, 0.0,
                  [](double v, const ModulationSample& s) { return std::max(v, s.frame.constraint_residual); });
}

}  // namespace cflow
