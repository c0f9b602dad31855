#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <optional>
#include <variant>

#include <Eigen/Dense>

namespace cflow {

using cplx = std::complex<double>;
using Index = Eigen::Index;

/// Truncated mode sequence (alpha_0, ..., alpha_{N-1}); alpha_n = 0 for n >= N.
class ModeVector {
public:
    ModeVector() = default;
    explicit ModeVector(Index n) : c_(Eigen::VectorXcd::Zero(n)) {}
    explicit ModeVector(Eigen::VectorXcd coeffs) : c_(std::move(coeffs)) {}

    Index size() const noexcept { return c_.size(); }
    cplx& operator[](Index n) { return c_[n]; }
    cplx operator[](Index n) const { return c_[n]; }

    /// Entry n, or 0 beyond the truncation.
    cplx at_or_zero(Index n) const { return (n >= 0 && n < c_.size()) ? c_[n] : cplx{}; }

    const Eigen::VectorXcd& coeffs() const noexcept { return c_; }
    Eigen::VectorXcd& coeffs() noexcept { return c_; }

    bool all_finite() const { return c_.allFinite(); }

    static ModeVector delta(Index n_total, Index mode, cplx value = 1.0);

private:
    Eigen::VectorXcd c_;
};

/// Exponent s of the weight (n+1)^{2s}.
struct WeightedNormOrder {
    double s;
};

inline constexpr WeightedNormOrder kL2{0.0};
inline constexpr WeightedNormOrder kHHalf{0.5};
inline constexpr WeightedNormOrder kH1{1.0};

double weighted_norm(const ModeVector& alpha, WeightedNormOrder order);

/// (e^{i theta + i n mu} alpha_n)
ModeVector gauge_apply(const ModeVector& alpha, double theta, double mu);

ModeVector scaling_apply(const ModeVector& alpha, double c);

struct SingleMode {
    Index mode;
    cplx c;
};

/// Geometric standing wave A_n = c p^n. Without a scale this is the normalized
/// ground state c = 1 - p^2 (Q = H = 1, lambda = 1).
struct Ground {
    double p;
    std::optional<cplx> scale;

    cplx c() const { return scale.value_or(cplx(1.0 - p * p)); }
};

/// Closed-form standing wave with its frequency lambda.
struct ReferenceState {
    std::variant<SingleMode, Ground> kind;

    static ReferenceState single_mode(Index mode, cplx c) { return {SingleMode{mode, c}}; }
    static ReferenceState ground(double p) { return {Ground{p, std::nullopt}}; }
    static ReferenceState geometric(double p, cplx c) { return {Ground{p, c}}; }

    double lambda() const;
    std::string describe() const;
};

struct TruncatedReference {
    ModeVector amplitudes;
    double lambda;
    /// sum_{n >= N} (n+1)^2 |A_n|^2, in closed form.
    double tail_mass;
};

TruncatedReference make_reference(const ReferenceState& ref, Index n_total);

/// Normalized ground state A_n(p) = (1-p^2) p^n as a real vector.
Eigen::VectorXd ground_amplitudes(double p, Index n_total);
/// dA_n/dp = (1-p^2) n p^{n-1} - 2 p^{n+1}; regular at p = 0.
Eigen::VectorXd ground_derivative(double p, Index n_total);
/// d^2A_n/dp^2.
Eigen::VectorXd ground_second_derivative(double p, Index n_total);

/// Tail of the h^1 mass of A(p) beyond index n_total.
double ground_tail_mass(double p, Index n_total);

/// Smallest N with p^N below `tail_tol` (at least `n_min`).
Index truncation_for(double p, double tail_tol = 1e-12, Index n_min = 8);

void require_ground_parameter(double p);

/// p^k with p^k := 0 for k < 0 (the prefactors vanish there).
double ipow(double p, long k);

}  // namespace cflow
