#include "doctest.h"

#include "cflow/errors.hpp"
#include "cflow/flow.hpp"
#include "cflow/observables.hpp"
#include "cflow/state.hpp"
#include "support.hpp"

using namespace cflow;
using doctest::Approx;

TEST_CASE("weighted norm examples") {
    CHECK(weighted_norm(ModeVector::delta(6, 0), kH1) == Approx(1.0).epsilon(1e-15));
    for (double p : {0.0, 0.3, 0.6}) {
        const ModeVector A = testing::ground(p, truncation_for(p, 1e-17));
        CHECK(weighted_norm(A, kH1) == Approx(std::sqrt((1 + p * p) / (1 - p * p))).epsilon(1e-13));
    }
    ModeVector two(4);
    two[0] = 1.0;
    two[1] = 1.0;
    CHECK(weighted_norm(two, kHHalf) == Approx(std::sqrt(3.0)).epsilon(1e-15));
    CHECK(weighted_norm(ModeVector(3), WeightedNormOrder{2.5}) == 0.0);
}

TEST_CASE("gauge action") {
    const ModeVector a = testing::random_disc(20, 5);
    const ModeVector same = gauge_apply(a, 0.0, 0.0);
    CHECK(same.coeffs() == a.coeffs());

    const ModeVector d = gauge_apply(ModeVector::delta(4, 0), 0.7, 1.3);
    CHECK(std::abs(d[0] - std::polar(1.0, 0.7)) < 1e-15);
    CHECK(d[1] == cplx(0.0));

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const ModeVector b = testing::random_disc(16, seed);
        const double th = 0.37 * static_cast<double>(seed), mu = -1.1 * static_cast<double>(seed);
        const ModeVector g = gauge_apply(b, th, mu);
        for (double s : {0.0, 0.5, 1.0, 1.7})
            CHECK(testing::rel(weighted_norm(g, {s}), weighted_norm(b, {s})) <= 1e-14);
        CHECK(testing::rel(charge(g), charge(b)) <= 1e-14);
        CHECK(testing::rel(higher_charge(g), higher_charge(b)) <= 1e-14);
        CHECK(std::abs(g[3] - b[3] * std::polar(1.0, th + 3.0 * mu)) < 1e-15);
    }
}

TEST_CASE("scaling action") {
    const ModeVector a = testing::random_disc(12, 8);
    CHECK(scaling_apply(a, 1.0).coeffs() == a.coeffs());
    const ModeVector b = scaling_apply(a, 1.7);
    CHECK(testing::rel(charge(b), 1.7 * 1.7 * charge(a)) <= 1e-13);
    CHECK(testing::rel(energy_fast(b), std::pow(1.7, 4) * energy_fast(a)) <= 1e-13);
    CHECK_THROWS_AS(scaling_apply(a, 0.0), ValidationError);
    CHECK_THROWS_AS(scaling_apply(a, -1.0), ValidationError);
}

TEST_CASE("reference states") {
    SUBCASE("ground state at p = 0 is the first unit vector") {
        const auto r = make_reference(ReferenceState::ground(0.0), 8);
        CHECK(r.amplitudes.coeffs() == ModeVector::delta(8, 0).coeffs());
        CHECK(r.lambda == 1.0);
        CHECK(r.tail_mass == 0.0);
    }
    SUBCASE("ground state entry") {
        const auto r = make_reference(ReferenceState::ground(0.5), 8);
        CHECK(r.amplitudes[2].real() == Approx(0.1875).epsilon(1e-15));
        CHECK(r.lambda == Approx(1.0));
    }
    SUBCASE("single mode") {
        const auto r = make_reference(ReferenceState::single_mode(3, 2.0), 6);
        CHECK(r.amplitudes.coeffs() == ModeVector::delta(6, 3, 2.0).coeffs());
        CHECK(r.lambda == Approx(4.0));
        CHECK(r.tail_mass == 0.0);
    }
    SUBCASE("scaled geometric state") {
        const ReferenceState ref = ReferenceState::geometric(0.5, 2.0);
        CHECK(ref.lambda() == Approx(4.0 / (0.75 * 0.75)));
        const auto r = make_reference(ref, 5);
        CHECK(r.amplitudes[1].real() == Approx(1.0));
    }
    SUBCASE("invalid parameters") {
        CHECK_THROWS_AS(make_reference(ReferenceState::ground(1.0), 8), ValidationError);
        CHECK_THROWS_AS(make_reference(ReferenceState::ground(-0.1), 8), ValidationError);
        CHECK_THROWS_AS(make_reference(ReferenceState::ground(1.5), 8), ValidationError);
    }
}

TEST_CASE("tail mass matches direct summation") {
    for (double p : {0.1, 0.5, 0.8})
        for (Index n : {4, 16, 40}) {
            double direct = 0.0;
            for (Index k = n; k < 4000; ++k)
                direct += std::pow(static_cast<double>(k + 1), 2) * std::pow((1 - p * p) * std::pow(p, double(k)), 2);
            CHECK(ground_tail_mass(p, n) == Approx(direct).epsilon(1e-12));
        }
    CHECK(ground_tail_mass(0.0, 3) == 0.0);
}

TEST_CASE("ground-state derivatives against finite differences") {
    const double h = 1e-5;
    for (double p : {0.1, 0.4, 0.7}) {
        const Eigen::VectorXd d1 = ground_derivative(p, 30);
        const Eigen::VectorXd d2 = ground_second_derivative(p, 30);
        const Eigen::VectorXd fd1 = (ground_amplitudes(p + h, 30) - ground_amplitudes(p - h, 30)) / (2 * h);
        const Eigen::VectorXd fd2 =
            (ground_derivative(p + h, 30) - ground_derivative(p - h, 30)) / (2 * h);
        CHECK((d1 - fd1).norm() <= 1e-8 * std::max(1.0, d1.norm()));
        CHECK((d2 - fd2).norm() <= 1e-7 * std::max(1.0, d2.norm()));
    }
    const Eigen::VectorXd at0 = ground_derivative(0.0, 4);
    CHECK(at0(0) == 0.0);
    CHECK(at0(1) == 1.0);
    CHECK(at0(2) == 0.0);
}

TEST_CASE("truncated ground state is stationary up to a geometrically small residual") {
    for (double p : {0.3, 0.6}) {
        double previous = HUGE_VAL;
        for (Index n : {10, 20, 30, 40}) {
            const ModeVector A = testing::ground(p, n);
            const double residual = testing::h1_distance(vector_field_fast(A), A);
            if (previous > 1e-14) CHECK(residual < previous);
            CHECK(residual <= 1e3 * std::pow(p, static_cast<double>(n)) + 1e-15);
            previous = residual;
        }
    }
}

TEST_CASE("ground state is a critical point of K") {
    const double h = 1e-5;
    for (double p : {0.2, 0.5}) {
        const Index n = truncation_for(p, 1e-15);
        const ModeVector A = testing::ground(p, n);
        double grad2 = 0.0;
        for (Index k = 0; k < n; ++k)
            for (cplx dir : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
                ModeVector plus = A, minus = A;
                plus[k] += h * dir;
                minus[k] -= h * dir;
                const double g = (functional_K(plus, 1.0) - functional_K(minus, 1.0)) / (2 * h);
                grad2 += g * g;
            }
        CHECK(std::sqrt(grad2) <= 1e-6);
    }
}

TEST_CASE("truncation_for and ipow") {
    CHECK(truncation_for(0.0) == 8);
    CHECK(std::pow(0.5, static_cast<double>(truncation_for(0.5, 1e-12))) < 1e-12);
    CHECK(std::pow(0.5, static_cast<double>(truncation_for(0.5, 1e-12) - 1)) >= 1e-12);
    CHECK(ipow(0.5, -1) == 0.0);
    CHECK(ipow(0.0, 0) == 1.0);
    CHECK(ipow(0.5, 3) == 0.125);
}

TEST_CASE("reference descriptions") {
    CHECK_FALSE(ReferenceState::ground(0.3).describe().empty());
    CHECK_FALSE(ReferenceState::single_mode(2, 1.0).describe().empty());
}
