#include "cflow/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cflow/errors.hpp"
#include "cflow/kernel.hpp"
#include "cflow/summation.hpp"

namespace cflow {

namespace {

bool use_compensated(const ModeVector& alpha) {
    return alpha.size() > detail::kCompensatedThreshold;
}

double weighted_square_sum(const ModeVector& alpha, int power) {
    detail::Accumulator<double> acc(use_compensated(alpha));
    for (Index n = 0; n < alpha.size(); ++n) {
        double w = double(n + 1);
        if (power == 2) w *= w;
        acc.add(w * std::norm(alpha[n]));
    }
    return acc.value();
}

}  // namespace

double charge(const ModeVector& alpha) { return weighted_square_sum(alpha, 1); }

double higher_charge(const ModeVector& alpha) { return weighted_square_sum(alpha, 2); }

double energy_naive(const ModeVector& alpha) {
    const Index n_modes = alpha.size();
    detail::Accumulator<cplx> total(use_compensated(alpha));
    // The summand is symmetric under n <-> j; visit n <= j and double the off-diagonal.
    for (Index n = 0; n < n_modes; ++n) {
        for (Index j = n; j < n_modes; ++j) {
            const Index s = n + j;
            const Index k_lo = std::max<Index>(0, s - (n_modes - 1));
            const Index k_hi = std::min<Index>(s, n_modes - 1);
            cplx inner{};
            for (Index k = k_lo; k <= k_hi; ++k) {
                const Index m = s - k;
                inner += double(min_plus_one(n, j, k, m)) * alpha[k] * alpha[m];
            }
            const cplx outer = std::conj(alpha[n] * alpha[j]) * inner;
            total.add(n == j ? outer : 2.0 * outer);
        }
    }
    const cplx h = total.value();
    if (std::abs(h.imag()) > 1e-12 * std::max(1.0, std::abs(h.real()))) {
        std::ostringstream os;
        os << "energy_naive: imaginary residue " << h.imag() << " exceeds tolerance (H = " << h.real()
           << ")";
        throw NumericalError(os.str());
    }
    return h.real();
}

double energy_fast(const ModeVector& alpha) {
    if (alpha.size() == 0) return 0.0;
    const LayeredPairSums table = layered_pair_sums(alpha);
    detail::Accumulator<double> acc(use_compensated(alpha));
    for (Index l = 0; l <= table.max_layer(); ++l)
        for (Index s = 2 * l; s <= table.max_degree(); ++s) acc.add(std::norm(table(l, s)));
    return acc.value();
}

ConservedTriple conserved(const ModeVector& alpha) {
    return {energy_fast(alpha), charge(alpha), higher_charge(alpha)};
}

double gap(const ModeVector& alpha) {
    const double q = charge(alpha);
    return q * q - energy_fast(alpha);
}

double functional_K(const ModeVector& alpha, double lambda) {
    return 0.5 * energy_fast(alpha) - lambda * charge(alpha);
}

HankelIdentity hankel_identity_check(std::span<const cplx> x) {
    if (x.empty()) throw ValidationError("hankel_identity_check: empty sequence");
    const auto n = static_cast<long>(x.size()) - 1;
    for (long k = 0; k <= n; ++k) {
        if (x[k] != x[n - k]) throw ValidationError("hankel_identity_check: sequence is not palindromic");
    }

    double diag = 0.0;
    for (long k = 0; k <= n; ++k) diag += double((k + 1) * (n + 1 - k)) * std::norm(x[k]);
    cplx off{};
    for (long j = 0; j <= n; ++j)
        for (long k = 0; k <= n; ++k)
            off += double(std::min({j, n - j, k, n - k}) + 1) * std::conj(x[j]) * x[k];

    const long half = n / 2;
    const bool even = (n % 2 == 0);
    auto mult = [&](long k) { return (even && k == half) ? 1.0 : 2.0; };
    double rhs = 0.0;
    for (long j = 0; j <= half; ++j)
        for (long k = j + 1; k <= half; ++k) rhs += mult(j) * mult(k) * double(j + 1) * std::norm(x[j] - x[k]);

    return {diag - off.real(), rhs};
}

}  // namespace cflow
