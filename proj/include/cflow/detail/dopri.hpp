#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace cflow::detail {

/// Dormand-Prince 5(4) tableau (FSAL), advancing with the 5th-order solution.
struct DormandPrinceTableau {
    static constexpr std::array<double, 7> c{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - b*, the embedded 4th-order difference.
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

/// One adaptive step engine for y' = f(y) on a dense Eigen vector type.
template <typename Vec, typename Rhs>
class DormandPrince {
public:
    DormandPrince(Rhs rhs, double rel_tol, double abs_tol) : f_(std::move(rhs)), rtol_(rel_tol), atol_(abs_tol) {}

    void reset(const Vec& y) {
        f_(y, k1_);
        have_k1_ = true;
    }

    /// Scaled RMS norm of an error vector against y and y_new.
    double error_norm(const Vec& err, const Vec& y, const Vec& y_new) const {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < err.size(); ++i) {
            const double sc = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y_new[i]));
            const double r = std::abs(err[i]) / sc;
            acc += r * r;
        }
        return err.size() ? std::sqrt(acc / double(err.size())) : 0.0;
    }

    /// Attempts a step of size h from y; writes the candidate and returns the error norm.
    double attempt(const Vec& y, double h, Vec& y_new) {
        using T = DormandPrinceTableau;
        if (!have_k1_) reset(y);
        tmp_ = y + h * (T::a21 * k1_);
        f_(tmp_, k2_);
        tmp_ = y + h * (T::a31 * k1_ + T::a32 * k2_);
        f_(tmp_, k3_);
        tmp_ = y + h * (T::a41 * k1_ + T::a42 * k2_ + T::a43 * k3_);
        f_(tmp_, k4_);
        tmp_ = y + h * (T::a51 * k1_ + T::a52 * k2_ + T::a53 * k3_ + T::a54 * k4_);
        f_(tmp_, k5_);
        tmp_ = y + h * (T::a61 * k1_ + T::a62 * k2_ + T::a63 * k3_ + T::a64 * k4_ + T::a65 * k5_);
        f_(tmp_, k6_);
        y_new = y + h * (T::b1 * k1_ + T::b3 * k3_ + T::b4 * k4_ + T::b5 * k5_ + T::b6 * k6_);
        f_(y_new, k7_);
        err_ = h * (T::e1 * k1_ + T::e3 * k3_ + T::e4 * k4_ + T::e5 * k5_ + T::e6 * k6_ + T::e7 * k7_);
        evals_ += 6;
        return error_norm(err_, y, y_new);
    }

    /// Call after accepting the candidate from attempt() (first-same-as-last).
    void accept() { std::swap(k1_, k7_); }

    /// Invalidates the cached derivative (after an external modification of y).
    void invalidate() { have_k1_ = false; }

    /// Starting step from the usual two-evaluation heuristic.
    double initial_step(const Vec& y, double h_max) {
        if (!have_k1_) reset(y);
        const double d0 = error_norm(y, y, y);
        const double d1 = error_norm(k1_, y, y);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, h_max);
        tmp_ = y + h0 * k1_;
        Vec f1;
        f_(tmp_, f1);
        ++evals_;
        const double d2 = error_norm(Vec(f1 - k1_), y, y) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
        return std::min({100.0 * h0, h1, h_max});
    }

    /// New step size proposal from an error norm.
    static double propose(double h, double err, bool last_rejected) {
        constexpr double safety = 0.9, fac_min = 0.2, fac_max = 5.0;
        double fac = err == 0.0 ? fac_max : safety * std::pow(err, -0.2);
        fac = std::clamp(fac, fac_min, last_rejected ? 1.0 : fac_max);
        return h * fac;
    }

    long evaluations() const noexcept { return evals_ + 1; }

private:
    Rhs f_;
    double rtol_, atol_;
    Vec k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, err_;
    bool have_k1_ = false;
    long evals_ = 0;
};

}  // namespace cflow::detail
