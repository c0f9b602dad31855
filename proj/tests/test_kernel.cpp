#include "doctest.h"

#include "cflow/errors.hpp"
#include "cflow/kernel.hpp"
#include "support.hpp"

using namespace cflow;

TEST_CASE("min_plus_one examples") {
    CHECK(min_plus_one(0, 0, 0, 0) == 1);
    CHECK(min_plus_one(1, 2, 0, 3) == 1);
    CHECK(min_plus_one(2, 3, 4, 1) == 2);
    static_assert(min_plus_one(5, 5, 5, 5) == 6);
}

TEST_CASE("min_plus_one symmetries hold exhaustively up to 64") {
    long failures = 0;
    for (long n = 0; n <= 64; ++n)
        for (long j = 0; j <= 64; ++j)
            for (long k = 0; k <= std::min(64L, n + j); ++k) {
                const long m = n + j - k;
                if (m > 64) continue;
                const long s = min_plus_one(n, j, k, m);
                if (s < 1 || s != min_plus_one(j, n, k, m) || s != min_plus_one(n, j, m, k) ||
                    s != min_plus_one(k, m, n, j))
                    ++failures;
            }
    CHECK(failures == 0);
}

TEST_CASE("layered pair sums: worked examples") {
    SUBCASE("two equal modes") {
        ModeVector a(3);
        a[0] = 1.0;
        a[1] = 1.0;
        const auto C = layered_pair_sums(a);
        CHECK(C(0, 0) == cplx(1.0));
        CHECK(C(0, 1) == cplx(2.0));
        CHECK(C(0, 2) == cplx(1.0));
        CHECK(C(1, 2) == cplx(1.0));
        CHECK(C(1, 3) == cplx(0.0));
        CHECK(C(2, 4) == cplx(0.0));
    }
    SUBCASE("zero state") {
        const auto C = layered_pair_sums(ModeVector(6));
        for (Index l = 0; l <= C.max_layer(); ++l)
            for (Index s = 2 * l; s <= C.max_degree(); ++s) CHECK(C(l, s) == cplx(0.0));
    }
    SUBCASE("single mode at zero") {
        const auto C = layered_pair_sums(ModeVector::delta(5, 0));
        for (Index l = 0; l <= C.max_layer(); ++l)
            for (Index s = 2 * l; s <= C.max_degree(); ++s) CHECK(C(l, s) == cplx(l == 0 && s == 0 ? 1.0 : 0.0));
    }
}

TEST_CASE("layered pair sums agree with the direct double sum") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Index n = 1 + static_cast<Index>(seed * 7 % 32);
        const ModeVector a = testing::random_disc(n, seed);
        const auto C = layered_pair_sums(a);
        double worst = 0.0;
        for (Index l = 0; l < n; ++l)
            for (Index s = 2 * l; s <= 2 * n - 2; ++s) {
                cplx direct{};
                for (Index k = l; k <= s - l; ++k) direct += a.at_or_zero(k) * a.at_or_zero(s - k);
                worst = std::max(worst, std::abs(C(l, s) - direct) / std::max(1.0, std::abs(direct)));
            }
        CHECK(worst <= 1e-13);
    }
}

TEST_CASE("layered pair sums satisfy the layer recurrence") {
    const ModeVector a = testing::random_disc(24, 99);
    const auto C = layered_pair_sums(a);
    double worst = 0.0;
    for (Index l = 0; l + 1 < 24; ++l)
        for (Index s = 2 * l + 1; s <= C.max_degree(); ++s)
            worst = std::max(worst, std::abs(C(l + 1, s) - (C(l, s) - 2.0 * a[l] * a.at_or_zero(s - l))));
    CHECK(worst <= 1e-13);
}

TEST_CASE("layered pair sums: partial layers and bounds") {
    const ModeVector a = testing::random_disc(10, 3);
    const auto full = layered_pair_sums(a);
    const auto part = layered_pair_sums(a, 3);
    CHECK(part.max_layer() == 3);
    for (Index l = 0; l <= 3; ++l)
        for (Index s = 2 * l; s <= 18; ++s) CHECK(part(l, s) == full(l, s));
    CHECK(part(4, 10) == cplx(0.0));
    CHECK(part(0, -1) == cplx(0.0));
}

TEST_CASE("layered pair sums reject layers beyond the truncation") {
    CHECK_THROWS_AS(layered_pair_sums(ModeVector(4), 4), ValidationError);
}
