#pragma once

#include <string>
#include <vector>

#include "evolveq/errors.hpp"
#include "evolveq/linalg.hpp"
#include "evolveq/operator_family.hpp"

namespace evolveq {

/// Expected outcome of the three condition suites on a catalog entry. The
/// catalog only ships families where the three conditions stand or fall
/// together, which is what the equivalence harness exercises.
struct TruthTable {
    bool kato53 = false;
    bool yosida = false;
    bool c1 = false;

    [[nodiscard]] static TruthTable all(bool v) { return {v, v, v}; }
    [[nodiscard]] bool consistent() const { return kato53 == yosida && yosida == c1; }
};

struct CatalogEntry {
    std::string name;
    OperatorFamily family;
    TruthTable truth;
    std::string notes;
};

namespace detail {

/// Second-difference matrix scaled by (d+1)^2: diagonal -2(d+1)^2, first
/// off-diagonals (d+1)^2. Negative definite; the stiffness grows like 4(d+1)^2.
[[nodiscard]] inline Matrix second_difference(int dim) {
    const double h2 = static_cast<double>(dim + 1) * static_cast<double>(dim + 1);
    Matrix l = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        l(i, i) = -2.0 * h2;
        if (i + 1 < dim) {
            l(i, i + 1) = h2;
            l(i + 1, i) = h2;
        }
    }
    return l;
}

/// Fixed symmetric perturbation direction: tridiag(1/2, 1, 1/2). Nonzero for
/// every dimension, norm below 2.
[[nodiscard]] inline Matrix perturbation_direction(int dim) {
    Matrix m = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        m(i, i) = 1.0;
        if (i + 1 < dim) {
            m(i, i + 1) = 0.5;
            m(i + 1, i) = 0.5;
        }
    }
    return m;
}

/// Base point -(||A1|| + 1) I: keeps A(t) = A0 + phi(t) A1 strictly
/// dissipative for any |phi| <= 1.
[[nodiscard]] inline Matrix dominating_base(const Matrix& a1) {
    const int dim = static_cast<int>(a1.rows());
    return -(spectral_norm(a1) + 1.0) * Matrix::Identity(dim, dim);
}

} // namespace detail

/// Names accepted by builtin(), in catalog order.
[[nodiscard]] inline std::vector<std::string> builtin_names() {
    return {"constant", "scalar_affine", "smooth_sin",
            "lipschitz_kink", "step", "discrete_laplacian"};
}

/// Construct a catalog entry by name. scalar_affine is one-dimensional by
/// definition; every other family accepts any dim >= 1.
[[nodiscard]] inline CatalogEntry builtin(const std::string& name, int dim) {
    if (dim < 1) throw input_error("builtin dimension must be >= 1");
    using SF = ScalarFunction;

    if (name == "constant") {
        Matrix a0 = Matrix::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) a0(i, i) = -static_cast<double>(i + 1);
        auto family = OperatorFamily::make(dim, {{SF::constant(1.0), a0}}, 0.0, true, true);
        return {"constant", std::move(family), TruthTable::all(true),
                "time-independent diagonal family"};
    }
    if (name == "scalar_affine") {
        if (dim != 1) throw input_error("scalar_affine is one-dimensional");
        Matrix one = Matrix::Identity(1, 1);
        auto family = OperatorFamily::make(
            1, {{SF::polynomial({-1.0, -1.0}), one}}, 0.0, true, true);
        return {"scalar_affine", std::move(family), TruthTable::all(true),
                "A(t) = -(1+t); every bound has a closed form"};
    }
    if (name == "smooth_sin") {
        const Matrix a1 = detail::perturbation_direction(dim);
        const Matrix a0 = detail::dominating_base(a1) + detail::second_difference(dim);
        auto family = OperatorFamily::make(
            dim, {{SF::constant(1.0), a0}, {SF::sine(1.0, M_PI), a1}}, 0.0, true, true);
        return {"smooth_sin", std::move(family), TruthTable::all(true),
                "smooth sinusoidal perturbation of a stiff negative base"};
    }
    if (name == "lipschitz_kink") {
        const Matrix a1 = detail::perturbation_direction(dim);
        auto family = OperatorFamily::make(
            dim, {{SF::constant(1.0), detail::dominating_base(a1)}, {SF::abs_shift(0.5), a1}},
            0.0, true, true);
        return {"lipschitz_kink", std::move(family), TruthTable::all(false),
                "Lipschitz but not differentiable at t = 1/2"};
    }
    if (name == "step") {
        const Matrix a1 = detail::perturbation_direction(dim);
        auto family = OperatorFamily::make(
            dim, {{SF::constant(1.0), detail::dominating_base(a1)}, {SF::step(0.5), a1}},
            0.0, true, true);
        return {"step", std::move(family), TruthTable::all(false),
                "jump at t = 1/2; bounded variation but no derivative"};
    }
    if (name == "discrete_laplacian") {
        auto family = OperatorFamily::make(
            dim, {{SF::polynomial({1.0, 0.0, 0.5}), detail::second_difference(dim)}},
            0.0, true, true);
        return {"discrete_laplacian", std::move(family), TruthTable::all(true),
                "stiff family (1 + t^2/2) L_h; all coefficients polynomial"};
    }
    throw input_error("unknown builtin family: " + name);
}

/// Conventional harness dimension for a builtin name.
[[nodiscard]] inline int builtin_default_dim(const std::string& name) {
    if (name == "scalar_affine") return 1;
    if (name == "constant") return 2;
    if (name == "discrete_laplacian") return 8;
    return 4;
}

} // namespace evolveq
