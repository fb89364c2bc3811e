#include <cmath>

#include "evolveq/catalog.hpp"
#include "evolveq/grid.hpp"
#include "test_support.hpp"

using namespace evolveq;

TEST_CASE("catalog lists six entries with consistent truth tables", "[catalog]") {
    auto names = builtin_names();
    REQUIRE(names.size() == 6);
    for (const auto& name : names) {
        auto entry = builtin(name, builtin_default_dim(name));
        CHECK(entry.name == name);
        CHECK(entry.truth.consistent());
        CHECK(entry.family.invertible);
    }
}

TEST_CASE("truth assignments match the catalog design", "[catalog]") {
    CHECK(builtin("constant", 2).truth.c1);
    CHECK(builtin("scalar_affine", 1).truth.c1);
    CHECK(builtin("smooth_sin", 4).truth.c1);
    CHECK(builtin("discrete_laplacian", 8).truth.c1);
    CHECK(!builtin("lipschitz_kink", 4).truth.c1);
    CHECK(!builtin("step", 4).truth.c1);
}

TEST_CASE("scalar_affine evaluates to -(1+t)", "[catalog]") {
    auto entry = builtin("scalar_affine", 1);
    CHECK(entry.family.eval(0.25)(0, 0) == -1.25);
    CHECK(entry.family.derivative_available());
    CHECK_THROWS_AS(builtin("scalar_affine", 2), input_error);
}

TEST_CASE("catalog families are uniformly invertible and dissipative", "[catalog]") {
    Grid probe = Grid::uniform(65);
    for (const auto& name : builtin_names()) {
        auto entry = builtin(name, builtin_default_dim(name));
        INFO(name);
        CHECK(entry.family.max_symmetric_eigenvalue(probe) <= 1e-10);
        for (double t : probe.points) {
            // guarded solves must not break down anywhere on the interval
            CHECK_NOTHROW(entry.family.resolvent_at(t));
            CHECK_NOTHROW(entry.family.b_operator(t, 0.5));
        }
    }
}

TEST_CASE("derivative availability tracks coefficient kinds", "[catalog]") {
    CHECK(builtin("constant", 3).family.derivative_available());
    CHECK(builtin("smooth_sin", 3).family.derivative_available());
    CHECK(builtin("discrete_laplacian", 3).family.derivative_available());
    CHECK(!builtin("lipschitz_kink", 3).family.derivative_available());
    CHECK(!builtin("step", 3).family.derivative_available());
}

TEST_CASE("kink and step place their singularity at the dyadic midpoint", "[catalog]") {
    auto kink = builtin("lipschitz_kink", 2).family;
    // |t - 1/2| coefficient: the two slopes differ by 2 A1
    const Matrix left = kink.eval(0.5 - 0.125);
    const Matrix right = kink.eval(0.5 + 0.125);
    CHECK(spectral_norm(left - right) <= 1e-14); // symmetric around the kink

    auto step_family = builtin("step", 2).family;
    const Matrix jump = step_family.eval(0.5) - step_family.eval(0.5 - 1e-9);
    CHECK(spectral_norm(jump) > 0.5); // the A1 jump is O(1)
}

TEST_CASE("discrete laplacian is stiff and scales like (d+1)^2", "[catalog]") {
    auto small = builtin("discrete_laplacian", 4).family;
    auto large = builtin("discrete_laplacian", 16).family;
    const double ns = spectral_norm(small.eval(0.0));
    const double nl = spectral_norm(large.eval(0.0));
    CHECK(nl > 5.0 * ns);
    // largest eigenvalue magnitude approaches 4 (d+1)^2 at t=0
    CHECK(nl == Catch::Approx(4.0 * 17.0 * 17.0).epsilon(0.05));
    // quadratic-in-time coefficient: A(1) = 1.5 A(0)
    CHECK(spectral_norm(large.eval(1.0)) == Catch::Approx(1.5 * nl).epsilon(1e-12));
}

TEST_CASE("smooth_sin base point dominates its perturbation", "[catalog]") {
    for (int dim : {1, 2, 4, 8}) {
        auto fam = builtin("smooth_sin", dim).family;
        INFO("dim " << dim);
        // strict dissipativity margin of at least 1 at every probe point
        CHECK(fam.max_symmetric_eigenvalue(Grid::uniform(129)) <= -1.0 + 1e-12);
    }
}
