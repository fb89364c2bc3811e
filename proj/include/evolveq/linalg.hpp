#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "evolveq/errors.hpp"

namespace evolveq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// ============================================================================
// Norms and conditioning
// ============================================================================

/// Operator norm induced by the Euclidean vector norm (largest singular value).
[[nodiscard]] inline double spectral_norm(const Matrix& m) {
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    return m.jacobiSvd().singularValues()(0);
}

/// Two-norm condition number; infinity for singular input.
[[nodiscard]] inline double condition_number(const Matrix& m) {
    const auto sv = m.jacobiSvd().singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

/// Accuracy budget for a guarded solve with condition estimate kappa.
[[nodiscard]] inline double solve_residual_tol(double kappa) {
    return 100.0 * std::numeric_limits<double>::epsilon() * kappa;
}

/// LU factorization with a condition guard. Everything downstream that needs
/// A^-1 or A^-1 * b goes through this; a condition estimate beyond kappa_max
/// raises breakdown_error tagged with the evaluation time t_context.
class GuardedSolver {
public:
    GuardedSolver(const Matrix& a, double t_context, double kappa_max,
                  const std::string& label = "matrix")
        : lu_(a), cond_(condition_number(a)) {
        if (!std::isfinite(cond_) || cond_ > kappa_max)
            throw breakdown_error(label + " is numerically singular at t = " +
                                      std::to_string(t_context) +
                                      " (condition estimate " + std::to_string(cond_) + ")",
                                  t_context, cond_);
    }

    [[nodiscard]] double cond() const { return cond_; }
    [[nodiscard]] Vector solve(const Vector& b) const { return lu_.solve(b); }
    [[nodiscard]] Matrix solve(const Matrix& b) const { return lu_.solve(b); }
    [[nodiscard]] Matrix inverse() const {
        return lu_.solve(Matrix::Identity(lu_.rows(), lu_.cols()));
    }

private:
    Eigen::PartialPivLU<Matrix> lu_;
    double cond_;
};

// ============================================================================
// Matrix exponential
// ============================================================================

namespace detail {

inline void pade_uv_13(const Matrix& a, Matrix& u, Matrix& v) {
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const auto n = a.rows();
    const Matrix id = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
             b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
        b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

template <int Degree>
inline void pade_uv_small(const Matrix& a, Matrix& u, Matrix& v) {
    static_assert(Degree == 3 || Degree == 5 || Degree == 7 || Degree == 9);
    static const double b3[] = {120.0, 60.0, 12.0, 1.0};
    static const double b5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
    static const double b7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                25200.0,    1512.0,    56.0,      1.0};
    static const double b9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                30270240.0,    2162160.0,    110880.0,     3960.0,
                                90.0,          1.0};
    const double* b = Degree == 3 ? b3 : Degree == 5 ? b5 : Degree == 7 ? b7 : b9;
    const auto n = a.rows();
    const Matrix id = Matrix::Identity(n, n);
    Matrix pow = Matrix::Identity(n, n); // A^0
    Matrix usum = b[1] * id;
    Matrix vsum = b[0] * id;
    const Matrix a2 = a * a;
    for (int k = 2; k <= Degree; k += 2) {
        pow = pow * a2; // A^k
        vsum += b[k] * pow;
        if (k + 1 <= Degree) usum += b[k + 1] * pow;
    }
    u = a * usum;
    v = vsum;
}

} // namespace detail

/// Scaling-and-squaring with diagonal Pade kernels (degrees 3..13). Backward
/// error stays at unit-roundoff scale, far inside the 1e-12 budget the
/// propagators assume.
[[nodiscard]] inline Matrix matrix_exponential(const Matrix& a) {
    if (a.rows() != a.cols()) throw input_error("matrix exponential needs a square matrix");
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    Matrix u, v;
    if (norm1 <= 1.495585217958292e-2) {
        detail::pade_uv_small<3>(a, u, v);
    } else if (norm1 <= 2.539398330063230e-1) {
        detail::pade_uv_small<5>(a, u, v);
    } else if (norm1 <= 9.504178996162932e-1) {
        detail::pade_uv_small<7>(a, u, v);
    } else if (norm1 <= 2.097847961257068) {
        detail::pade_uv_small<9>(a, u, v);
    } else {
        const double theta13 = 5.371920351148152;
        int squarings = 0;
        double scaled = norm1;
        while (scaled > theta13) {
            scaled *= 0.5;
            ++squarings;
        }
        const Matrix as = a / std::ldexp(1.0, squarings);
        detail::pade_uv_13(as, u, v);
        Matrix r = Eigen::PartialPivLU<Matrix>(v - u).solve(v + u);
        for (int i = 0; i < squarings; ++i) r = r * r;
        return r;
    }
    return Eigen::PartialPivLU<Matrix>(v - u).solve(v + u);
}

// ============================================================================
// Quadrature
// ============================================================================

/// Composite Simpson rule with an even number of panels. Value type only
/// needs scalar multiplication and addition (double, Vector, Matrix).
template <typename F>
[[nodiscard]] auto simpson(F&& f, double a, double b, int panels) -> decltype(f(a)) {
    if (panels < 2 || panels % 2 != 0) throw input_error("simpson needs an even panel count >= 2");
    const double h = (b - a) / panels;
    auto acc = f(a);
    acc += f(b);
    for (int i = 1; i < panels; ++i) {
        const double w = (i % 2 == 1) ? 4.0 : 2.0;
        acc += w * f(a + i * h);
    }
    return (h / 3.0) * acc;
}

} // namespace evolveq
