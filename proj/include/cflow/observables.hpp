#pragma once

#include <span>

#include "cflow/state.hpp"

namespace cflow {

struct ConservedTriple {
    double H = 0.0;  ///< quartic energy
    double Q = 0.0;  ///< charge
    double E = 0.0;  ///< higher charge
};

double charge(const ModeVector& alpha);
double higher_charge(const ModeVector& alpha);

/// Direct quadruple sum over the resonant set, O(N^3). Throws NumericalError if the
/// discarded imaginary part exceeds 1e-12 |H| (an indexing fault: the form is real).
double energy_naive(const ModeVector& alpha);

/// H = sum_l sum_s |C_l(s)|^2 through the layered pair sums, O(N^2).
double energy_fast(const ModeVector& alpha);

ConservedTriple conserved(const ModeVector& alpha);

/// G = Q^2 - H (nonnegative, zero exactly on geometric sequences).
double gap(const ModeVector& alpha);

/// K = H/2 - lambda Q.
double functional_K(const ModeVector& alpha, double lambda);

struct HankelIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Both sides of the quadratic-form identity behind the energy bound, for a
/// palindromic x_0..x_n (x_k = x_{n-k}):
///   lhs = sum_k (k+1)(n+1-k)|x_k|^2 - sum_{j,k} (min(j,n-j,k,n-k)+1) conj(x_j) x_k
///   rhs = sum_{j<k<=K} m_j m_k (j+1) |x_j - x_k|^2,   K = floor(n/2),
/// where m_k = 2 except for the centre entry of even n (m_K = 1). For odd n this is
/// 4 sum_{j<k<=K} (j+1)|x_j - x_k|^2. Throws ValidationError for non-palindromic input.
HankelIdentity hankel_identity_check(std::span<const cplx> x);

}  // namespace cflow
