#include <cmath>
#include <random>

#include "evolveq/grid.hpp"
#include "evolveq/operator_family.hpp"
#include "test_support.hpp"

using namespace evolveq;

namespace {

OperatorFamily scalar_affine_family() {
    // A(t) = -(1+t) on R^1; every operator below has a closed form:
    //   B(t,s) = (2+t)/(2+s),  C(t,s) = (t-s)/(1+s)
    return OperatorFamily::make(
        1, {{ScalarFunction::polynomial({-1.0, -1.0}), Matrix::Identity(1, 1)}},
        0.0, true, true);
}

} // namespace

TEST_CASE("grid construction and refinement", "[grid]") {
    Grid g = Grid::dyadic(7);
    REQUIRE(g.size() == 129);
    CHECK(g[0] == 0.0);
    CHECK(g[128] == 1.0);
    CHECK(g.is_dyadic());
    CHECK(g.dyadic_level() == 7);
    CHECK(g.step() == Catch::Approx(1.0 / 128.0));

    // dyadic points are exact in binary: refinement reproduces them bitwise
    Grid coarse = g.coarsened();
    REQUIRE(coarse.size() == 65);
    for (std::size_t i = 0; i < coarse.size(); ++i) CHECK(coarse[i] == g[2 * i]);

    CHECK(g.index_of(0.5) == 64);
    CHECK(g.index_of(0.12345) == -1);
    CHECK_THROWS_AS(Grid::uniform(1), input_error);
}

TEST_CASE("scalar function kinds evaluate and differentiate", "[operator-core]") {
    auto poly = ScalarFunction::polynomial({1.0, -2.0, 3.0}); // 1 - 2t + 3t^2
    CHECK(poly.value(0.5) == Catch::Approx(1.0 - 1.0 + 0.75).margin(1e-16));
    CHECK(poly.derivative_value(0.5) == Catch::Approx(-2.0 + 3.0).margin(1e-16));

    auto wave = ScalarFunction::sine(2.0, M_PI);
    CHECK(wave.value(0.5) == Catch::Approx(2.0).margin(1e-15));
    CHECK(wave.derivative_value(0.5) == Catch::Approx(0.0).margin(1e-15));

    auto kink = ScalarFunction::abs_shift(0.5);
    CHECK(kink.value(0.25) == 0.25);
    CHECK(!kink.has_derivative());
    CHECK_THROWS_AS(kink.derivative_value(0.25), derivative_unavailable);

    auto jump = ScalarFunction::step(0.5);
    CHECK(jump.value(0.4999999) == 0.0);
    CHECK(jump.value(0.5) == 1.0);

    auto lerp = ScalarFunction::sampled({{0.0, 1.0}, {1.0, 2.0}});
    CHECK(lerp.value(0.5) == Catch::Approx(1.5).margin(1e-16));
    CHECK(lerp.value(1.0) == 2.0);
    CHECK_THROWS_AS(ScalarFunction::sampled({{0.0, 1.0}}), input_error);
    CHECK_THROWS_AS(ScalarFunction::sampled({{0.0, 1.0}, {0.0, 2.0}}), input_error);
}

TEST_CASE("family evaluation on the scalar affine closed forms", "[operator-core]") {
    auto family = scalar_affine_family();
    CHECK(family.eval(0.0)(0, 0) == -1.0);
    CHECK(family.eval(0.5)(0, 0) == -1.5);
    CHECK(family.eval(1.0)(0, 0) == -2.0);
    CHECK(family.derivative_at(0.3)(0, 0) == -1.0);
    CHECK(family.resolvent_at(0.0)(0, 0) == Catch::Approx(-1.0).margin(1e-15));

    CHECK(family.b_operator(1.0, 0.0)(0, 0) == Catch::Approx(1.5).margin(1e-14));
    CHECK(family.b_operator(0.25, 0.75)(0, 0) == Catch::Approx(2.25 / 2.75).margin(1e-14));
    CHECK(family.c_operator(1.0, 0.0)(0, 0) == Catch::Approx(1.0).margin(1e-14));
    CHECK(family.c_operator(0.75, 0.25)(0, 0) == Catch::Approx(0.4).margin(1e-14));

    CHECK_THROWS_AS(family.eval(-0.1), std::domain_error);
    CHECK_THROWS_AS(family.eval(1.1), std::domain_error);
}

TEST_CASE("shift moves the spectrum", "[operator-core]") {
    auto family = OperatorFamily::make(
        2, {{ScalarFunction::constant(1.0), Matrix::Identity(2, 2)}}, 3.0, true, true);
    // A(t) = I - 3 I = -2 I
    CHECK(family.eval(0.7)(0, 0) == -2.0);
    CHECK(family.eval(0.7)(1, 1) == -2.0);
}

TEST_CASE("construction rejects malformed input", "[operator-core]") {
    CHECK_THROWS_AS(OperatorFamily::make(0, {}, 0.0, true, true), input_error);
    CHECK_THROWS_AS(OperatorFamily::make(2, {}, -1.0, true, true), input_error);
    Matrix wrong(3, 3);
    wrong.setZero();
    CHECK_THROWS_AS(
        OperatorFamily::make(2, {{ScalarFunction::constant(1.0), wrong}}, 0.0, true, true),
        input_error);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(
        OperatorFamily::make(2, {{ScalarFunction::constant(1.0), bad}}, 0.0, true, true),
        input_error);
}

TEST_CASE("resolvent breaks down on singular families", "[operator-core]") {
    // A(t) = (t - 1/2) I is singular at t = 1/2
    auto family = OperatorFamily::make(
        2, {{ScalarFunction::polynomial({-0.5, 1.0}), Matrix::Identity(2, 2)}}, 0.0, true,
        false);
    CHECK_THROWS_AS(family.resolvent_at(0.5), breakdown_error);
    try {
        (void)family.resolvent_at(0.5);
    } catch (const breakdown_error& e) {
        CHECK(e.t == 0.5);
    }
    // not declared invertible -> resolvent refuses up front
    auto undeclared = OperatorFamily::make(
        2, {{ScalarFunction::constant(-1.0), Matrix::Identity(2, 2)}}, 0.0, false, false);
    CHECK_THROWS_AS(undeclared.resolvent_at(0.25), input_error);
}

TEST_CASE("operator identities hold on random smooth families", "[operator-core][property]") {
    std::mt19937_64 rng(91);
    for (int trial = 0; trial < 12; ++trial) {
        const int dim = 1 + static_cast<int>(rng() % 6);
        auto family = test_support::random_smooth_family(rng, dim);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double t = unit(rng), s = unit(rng), s0 = unit(rng);

        const Matrix id = Matrix::Identity(dim, dim);
        const double scale = spectral_norm(family.eval(t));

        // resolvent really inverts
        CHECK(spectral_norm(family.eval(t) * family.resolvent_at(t) - id) <= 1e-10 * scale);

        // B(s,s) = 1, C(s,s) = 0
        CHECK(spectral_norm(family.b_operator(s, s) - id) <= 1e-12 * scale);
        CHECK(spectral_norm(family.c_operator(s, s)) <= 1e-12 * scale);

        // two-point composition law for B
        const Matrix lhs = family.b_operator(t, s);
        const Matrix rhs = family.b_operator(t, s0) * family.b_operator(s0, s);
        CHECK(spectral_norm(lhs - rhs) <= 1e-10 * std::max(1.0, scale));

        // C links to B: (1-A(t)) = B(t,s)(1-A(s)) rearranged through A
        const Matrix c = family.c_operator(t, s);
        const Matrix reconstructed = (c + id) * family.eval(s);
        CHECK(spectral_norm(reconstructed - family.eval(t)) <= 1e-10 * std::max(1.0, scale));
    }
}

TEST_CASE("dissipative families have negative symmetric part", "[operator-core][property]") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 8; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 5);
        auto family = test_support::random_smooth_family(rng, dim);
        REQUIRE(family.dissipative);
        CHECK(family.max_symmetric_eigenvalue(Grid::uniform(65)) <= 1e-10);
    }
}
