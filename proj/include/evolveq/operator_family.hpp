#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "evolveq/errors.hpp"
#include "evolveq/grid.hpp"
#include "evolveq/linalg.hpp"
#include "evolveq/scalar_function.hpp"

namespace evolveq {

/// Time-dependent operator family A(t) = sum_k phi_k(t) M_k - shift * I on
/// [0,1], acting on R^d. Families are stored pre-shifted: the flags promise
/// that A(t) and 1 - A(t) stay invertible on the whole interval, and the
/// guarded solves turn any violation into a breakdown_error at run time.
struct OperatorFamily {
    struct Term {
        ScalarFunction coeff;
        Matrix matrix;
    };

    int dim = 0;
    std::vector<Term> terms;
    double shift = 0.0;
    bool invertible = false;
    bool dissipative = false;
    double kappa_max = 1e12;

    [[nodiscard]] static OperatorFamily make(int dim, std::vector<Term> terms,
                                             double shift, bool invertible,
                                             bool dissipative) {
        if (dim < 1) throw input_error("family dimension must be >= 1");
        if (shift < 0.0) throw input_error("family shift must be >= 0");
        for (const auto& term : terms) {
            if (term.matrix.rows() != dim || term.matrix.cols() != dim)
                throw input_error("term matrix shape does not match family dimension");
            if (!term.matrix.allFinite())
                throw input_error("term matrix contains a non-finite entry");
        }
        OperatorFamily f;
        f.dim = dim;
        f.terms = std::move(terms);
        f.shift = shift;
        f.invertible = invertible;
        f.dissipative = dissipative;
        return f;
    }

    [[nodiscard]] bool derivative_available() const {
        for (const auto& term : terms)
            if (!term.coeff.has_derivative()) return false;
        return true;
    }

    /// A(t). Total on [0,1]; anything outside is a caller bug, not a verdict.
    [[nodiscard]] Matrix eval(double t) const {
        require_domain(t);
        Matrix a = Matrix::Zero(dim, dim);
        for (const auto& term : terms) a += term.coeff.value(t) * term.matrix;
        if (shift != 0.0) a.diagonal().array() -= shift;
        return a;
    }

    /// d/dt A(t); requires every coefficient to have a closed-form derivative.
    [[nodiscard]] Matrix derivative_at(double t) const {
        require_domain(t);
        if (!derivative_available())
            throw derivative_unavailable("family has no closed-form derivative");
        Matrix a = Matrix::Zero(dim, dim);
        for (const auto& term : terms) a += term.coeff.derivative_value(t) * term.matrix;
        return a;
    }

    /// A(t)^-1 via guarded dense LU.
    [[nodiscard]] Matrix resolvent_at(double t) const {
        require_invertible();
        return solver_at(t).inverse();
    }

    /// B(t,s) = (1 - A(t)) (1 - A(s))^-1
    [[nodiscard]] Matrix b_operator(double t, double s) const {
        const Matrix one_minus_t = Matrix::Identity(dim, dim) - eval(t);
        GuardedSolver solver(Matrix::Identity(dim, dim) - eval(s), s, kappa_max, "1 - A(s)");
        return one_minus_t * solver.inverse();
    }

    /// C(t,s) = A(t) A(s)^-1 - 1
    [[nodiscard]] Matrix c_operator(double t, double s) const {
        require_invertible();
        return eval(t) * solver_at(s).inverse() - Matrix::Identity(dim, dim);
    }

    /// Guarded factorization of A(t) for callers that reuse it.
    [[nodiscard]] GuardedSolver solver_at(double t) const {
        return GuardedSolver(eval(t), t, kappa_max, "A(t)");
    }

    /// sup over the grid of ||A(t)||; the reference magnitude all relative
    /// tolerances in the suites are scaled by.
    [[nodiscard]] double scale_on(const Grid& grid) const {
        double scale = 0.0;
        for (double t : grid.points) scale = std::max(scale, spectral_norm(eval(t)));
        return scale;
    }

    /// Largest eigenvalue of the symmetric part over a probe grid; dissipative
    /// families must keep it <= tol_psd.
    [[nodiscard]] double max_symmetric_eigenvalue(const Grid& probe) const {
        double worst = -std::numeric_limits<double>::infinity();
        for (double t : probe.points) {
            const Matrix a = eval(t);
            const Matrix sym = 0.5 * (a + a.transpose());
            Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
            worst = std::max(worst, es.eigenvalues().maxCoeff());
        }
        return worst;
    }

private:
    void require_domain(double t) const {
        if (!(t >= 0.0 && t <= 1.0))
            throw std::domain_error("family evaluated outside [0,1]: t = " + std::to_string(t));
    }

    void require_invertible() const {
        if (!invertible)
            throw input_error("operation needs a family declared invertible");
    }
};

} // namespace evolveq
