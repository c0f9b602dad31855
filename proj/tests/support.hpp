#pragma once

// Independent brute-force oracles and fixtures shared by the unit tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "cflow/lab/random.hpp"
#include "cflow/state.hpp"

namespace testing {

using cflow::cplx;
using cflow::Index;
using cflow::ModeVector;

/// Entries uniform in the unit complex disc.
inline ModeVector random_disc(Index n, std::uint64_t seed) {
    cflow::lab::SplitMix64 rng(seed);
    ModeVector a(n);
    for (Index k = 0; k < n; ++k) a[k] = std::polar(std::sqrt(rng.uniform()), 2.0 * std::numbers::pi * rng.uniform());
    return a;
}

inline ModeVector ground(double p, Index n) {
    ModeVector a(n);
    for (Index k = 0; k < n; ++k) a[k] = (1.0 - p * p) * std::pow(p, static_cast<double>(k));
    return a;
}

inline long s_coeff(long n, long j, long k, long m) { return std::min(std::min(n, j), std::min(k, m)) + 1; }

/// Every (n, j, k) with m = n + j - k in range; no symmetry reduction.
inline cplx brute_energy(const ModeVector& a) {
    const long N = a.size();
    cplx h{};
    for (long n = 0; n < N; ++n)
        for (long j = 0; j < N; ++j)
            for (long k = 0; k < N; ++k) {
                const long m = n + j - k;
                if (m < 0 || m >= N) continue;
                h += static_cast<double>(s_coeff(n, j, k, m)) * std::conj(a[n]) * std::conj(a[j]) * a[k] * a[m];
            }
    return h;
}

/// (n+1) F_n = sum_{j,k} S conj(a_j) a_k a_{n+j-k}.
inline ModeVector brute_field(const ModeVector& a) {
    const long N = a.size();
    ModeVector f(N);
    for (long n = 0; n < N; ++n) {
        cplx s{};
        for (long j = 0; j < N; ++j)
            for (long k = 0; k < N; ++k) {
                const long m = n + j - k;
                if (m < 0 || m >= N) continue;
                s += static_cast<double>(s_coeff(n, j, k, m)) * std::conj(a[j]) * a[k] * a[m];
            }
        f[n] = s / static_cast<double>(n + 1);
    }
    return f;
}

inline double h1_distance(const ModeVector& x, const ModeVector& y) {
    double s = 0.0;
    for (Index k = 0; k < x.size(); ++k) s += std::pow(static_cast<double>(k + 1), 2) * std::norm(x[k] - y[k]);
    return std::sqrt(s);
}

inline double rel(double value, double exact) {
    return std::abs(value - exact) / std::max(1e-300, std::abs(exact));
}

}  // namespace testing
