#include "doctest.h"

#include <vector>

#include "cflow/errors.hpp"
#include "cflow/observables.hpp"
#include "support.hpp"

using namespace cflow;
using doctest::Approx;

namespace {
ModeVector two_modes(Index n = 4) {
    ModeVector a(n);
    a[0] = 1.0;
    a[1] = 1.0;
    return a;
}
}  // namespace

TEST_CASE("charges") {
    CHECK(charge(ModeVector(5)) == 0.0);
    CHECK(charge(two_modes()) == Approx(3.0));
    CHECK(higher_charge(ModeVector::delta(5, 0)) == Approx(1.0));
    CHECK(higher_charge(two_modes()) == Approx(5.0));
    for (double p : {0.0, 0.4, 0.8}) {
        const ModeVector A = testing::ground(p, truncation_for(p, 1e-17));
        CHECK(charge(A) == Approx(1.0).epsilon(1e-13));
        CHECK(higher_charge(A) == Approx((1 + p * p) / (1 - p * p)).epsilon(1e-13));
    }
}

TEST_CASE("quartic energy: worked values") {
    CHECK(energy_naive(two_modes()) == Approx(7.0).epsilon(1e-15));
    CHECK(energy_fast(two_modes()) == Approx(7.0).epsilon(1e-15));
    CHECK(testing::brute_energy(two_modes()).real() == Approx(7.0));
    CHECK(energy_fast(ModeVector(9)) == 0.0);
    CHECK(energy_naive(ModeVector(9)) == 0.0);
    for (Index m : {0, 1, 4}) {
        const cplx c(0.6, -1.1);
        const ModeVector a = ModeVector::delta(8, m, c);
        const double expect = static_cast<double>(m + 1) * std::pow(std::abs(c), 4);
        CHECK(energy_naive(a) == Approx(expect).epsilon(1e-14));
        CHECK(energy_fast(a) == Approx(expect).epsilon(1e-14));
    }
    for (double p : {0.3, 0.6}) {
        const ModeVector A = testing::ground(p, truncation_for(p, 1e-14));
        CHECK(std::abs(energy_naive(A) - 1.0) <= 1e-10);
        CHECK(std::abs(energy_fast(A) - 1.0) <= 1e-10);
    }
}

TEST_CASE("fast and naive energies agree with the brute-force oracle") {
    double worst_pair = 0.0, worst_brute = 0.0, worst_bound = -HUGE_VAL;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        const Index n = 1 + static_cast<Index>(seed % 32);
        const ModeVector a = testing::random_disc(n, seed);
        const double fast = energy_fast(a), naive = energy_naive(a);
        worst_pair = std::max(worst_pair, std::abs(fast - naive) / std::max(1.0, std::abs(naive)));
        if (seed % 50 == 0) {
            const cplx brute = testing::brute_energy(a);
            worst_brute = std::max(worst_brute, std::abs(fast - brute) / std::max(1.0, std::abs(brute)));
        }
        const double q = charge(a);
        worst_bound = std::max(worst_bound, fast - q * q);
    }
    CHECK(worst_pair <= 1e-12);
    CHECK(worst_brute <= 1e-12);
    CHECK(worst_bound <= 1e-10);
}

TEST_CASE("compensated path for large truncations stays consistent") {
    const ModeVector a = testing::random_disc(300, 77);
    const double fast = energy_fast(a);
    const double naive = energy_naive(a);
    CHECK(std::abs(fast - naive) <= 1e-12 * fast);
}

TEST_CASE("gap functional") {
    CHECK(gap(two_modes()) == Approx(2.0).epsilon(1e-15));
    CHECK(gap(ModeVector(4)) == 0.0);
    cflow::lab::SplitMix64 rng(2024);
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        const cplx p = std::polar(0.8 * std::sqrt(rng.uniform()), 6.283185307179586 * rng.uniform());
        const cplx c = std::polar(0.5 + rng.uniform(), 6.283185307179586 * rng.uniform());
        Index n = 8;
        while (std::pow(std::abs(p), static_cast<double>(n)) >= 1e-13) ++n;
        ModeVector a(n);
        cplx pk = 1.0;
        for (Index k = 0; k < n; ++k, pk *= p) a[k] = c * pk;
        worst = std::max(worst, std::abs(gap(a)));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("first variation of the gap vanishes at the ground state") {
    const double h = 1e-5;
    for (double p : {0.2, 0.5, 0.8}) {
        const Index n = truncation_for(p, 1e-15);
        const ModeVector A = testing::ground(p, n);
        double g2 = 0.0;
        for (Index k = 0; k < n; ++k)
            for (cplx dir : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
                ModeVector plus = A, minus = A;
                plus[k] += h * dir;
                minus[k] -= h * dir;
                const double g = (gap(plus) - gap(minus)) / (2 * h);
                g2 += g * g;
            }
        CHECK(std::sqrt(g2) <= 1e-6);
    }
}

TEST_CASE("functional K") {
    const ModeVector A = testing::ground(0.5, truncation_for(0.5, 1e-17));
    CHECK(functional_K(A, 1.0) == Approx(-0.5).epsilon(1e-13));
    CHECK(functional_K(ModeVector(3), 2.0) == 0.0);
    const cplx c(1.2, 0.5);
    const double c2 = std::norm(c);
    CHECK(functional_K(ModeVector::delta(4, 0, c), c2) == Approx(-c2 * c2 / 2).epsilon(1e-14));
}

TEST_CASE("scaling covariance of the observables") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const ModeVector a = testing::random_disc(24, seed);
        const double c = 0.3 + 0.1 * static_cast<double>(seed);
        const ModeVector b = scaling_apply(a, c);
        CHECK(testing::rel(energy_fast(b), std::pow(c, 4) * energy_fast(a)) <= 1e-13);
        CHECK(testing::rel(charge(b), c * c * charge(a)) <= 1e-13);
    }
}

TEST_CASE("conserved triple ordering") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const ConservedTriple t = conserved(testing::random_disc(16, seed));
        CHECK(t.Q <= t.E);
        CHECK(t.H >= 0.0);
        CHECK(t.H <= t.Q * t.Q * (1 + 1e-12));
    }
}

TEST_CASE("Hankel identity") {
    auto direct_lhs = [](const std::vector<cplx>& x) {
        const long n = static_cast<long>(x.size()) - 1;
        cplx s{};
        for (long k = 0; k <= n; ++k) s += static_cast<double>((k + 1) * (n + 1 - k)) * std::norm(x[k]);
        for (long j = 0; j <= n; ++j)
            for (long k = 0; k <= n; ++k)
                s -= static_cast<double>(std::min({j, n - j, k, n - k}) + 1) * std::conj(x[j]) * x[k];
        return s.real();
    };
    SUBCASE("constant sequence saturates") {
        for (std::size_t len : {4u, 5u, 8u}) {
            std::vector<cplx> x(len, cplx(0.7, 0.2));
            const auto r = hankel_identity_check(x);
            CHECK(std::abs(r.lhs) <= 1e-13);
            CHECK(std::abs(r.rhs) <= 1e-13);
        }
    }
    SUBCASE("interior zeros") {
        std::vector<cplx> x{1.0, 0.0, 0.0, 1.0};
        const auto r = hankel_identity_check(x);
        CHECK(r.lhs == Approx(direct_lhs(x)));
        CHECK(r.lhs == Approx(r.rhs));
        CHECK(r.rhs == Approx(4.0));  // 4 (0+1) |1 - 0|^2
    }
    SUBCASE("zero") {
        std::vector<cplx> x(6, 0.0);
        const auto r = hankel_identity_check(x);
        CHECK(r.lhs == 0.0);
        CHECK(r.rhs == 0.0);
    }
    SUBCASE("random palindromes of both parities") {
        for (std::uint64_t seed = 1; seed <= 40; ++seed) {
            const std::size_t len = 2 + seed % 15;
            const ModeVector half = testing::random_disc(static_cast<Index>(len), seed);
            std::vector<cplx> x(len);
            for (std::size_t k = 0; k < len; ++k) x[k] = half[static_cast<Index>(std::min(k, len - 1 - k))];
            const auto r = hankel_identity_check(x);
            CHECK(std::abs(r.lhs - r.rhs) <= 1e-12 * std::max(1.0, std::abs(r.rhs)));
            CHECK(std::abs(r.lhs - direct_lhs(x)) <= 1e-12 * std::max(1.0, std::abs(r.lhs)));
            CHECK(r.rhs >= 0.0);
        }
    }
    SUBCASE("non-palindromic input is rejected") {
        std::vector<cplx> x{1.0, 2.0, 3.0};
        CHECK_THROWS_AS(hankel_identity_check(x), ValidationError);
    }
}
