#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "evolveq/errors.hpp"
#include "evolveq/grid.hpp"
#include "evolveq/linalg.hpp"
#include "evolveq/operator_family.hpp"
#include "evolveq/parallel.hpp"
#include "evolveq/reports.hpp"

namespace evolveq {

enum class StepMethod { frozen, rk4 };

[[nodiscard]] inline StepMethod step_method_from_name(const std::string& name) {
    if (name == "frozen") return StepMethod::frozen;
    if (name == "rk4") return StepMethod::rk4;
    throw input_error("unknown stepping method '" + name + "' (use frozen or rk4)");
}

struct PropagatorOptions {
    StepMethod method = StepMethod::frozen;
    int n_sub = 16;                // substeps per grid interval
    double tol_cocycle = 1e-8;     // absolute residual cap for the composition law
    double tol_contraction = 1e-8; // allowed excess over operator norm 1
};

// ============================================================
// One-interval transition approximations
// ============================================================

/// Product of midpoint-frozen exponentials over n substeps of [s,t],
/// later factors multiplying from the left. Second order in the substep.
[[nodiscard]] inline Matrix frozen_product(const OperatorFamily& family, double s, double t,
                                           int n) {
    if (!(t >= s)) throw input_error("transition needs t >= s");
    if (n < 1) throw input_error("substep count must be positive");
    const int d = family.dim;
    Matrix p = Matrix::Identity(d, d);
    if (t == s) return p;
    const double delta = (t - s) / static_cast<double>(n);
    for (int j = 0; j < n; ++j) {
        const double mid = s + (static_cast<double>(j) + 0.5) * delta;
        p = matrix_exponential(delta * family.eval(mid)) * p;
    }
    return p;
}

namespace detail {

/// Crude stiffness bound: largest Frobenius norm of A over a few samples.
[[nodiscard]] inline double stiffness_estimate(const OperatorFamily& family, double s, double t) {
    double rho = 0.0;
    for (double w : {0.0, 0.25, 0.5, 0.75, 1.0})
        rho = std::max(rho, family.eval(s + w * (t - s)).norm());
    return rho;
}

/// Substep count that keeps classical RK4 inside its stability region for
/// the sampled stiffness, never below the requested count.
[[nodiscard]] inline int guarded_steps(const OperatorFamily& family, double s, double t, int n) {
    const double rho = stiffness_estimate(family, s, t);
    const double needed = (t - s) * rho / 2.0;
    if (needed > static_cast<double>(n))
        return static_cast<int>(std::ceil(needed));
    return n;
}

template <typename State>
[[nodiscard]] State rk4_march(const OperatorFamily& family, double s, double t, int n,
                              State u) {
    const double delta = (t - s) / static_cast<double>(n);
    for (int j = 0; j < n; ++j) {
        const double tau = s + static_cast<double>(j) * delta;
        const Matrix a1 = family.eval(tau);
        const Matrix a2 = family.eval(tau + 0.5 * delta);
        const Matrix a4 = family.eval(tau + delta);
        const State k1 = a1 * u;
        const State k2 = a2 * (u + (0.5 * delta) * k1);
        const State k3 = a2 * (u + (0.5 * delta) * k2);
        const State k4 = a4 * (u + delta * k3);
        u += (delta / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return u;
}

} // namespace detail

/// Classical RK4 on U' = A(t) U, U(s) = I, with a stability guard that
/// raises the substep count on stiff stretches.
[[nodiscard]] inline Matrix reference_rk4(const OperatorFamily& family, double s, double t,
                                          int n) {
    if (!(t >= s)) throw input_error("transition needs t >= s");
    if (n < 1) throw input_error("substep count must be positive");
    const int d = family.dim;
    if (t == s) return Matrix::Identity(d, d);
    const int n_eff = detail::guarded_steps(family, s, t, n);
    return detail::rk4_march<Matrix>(family, s, t, n_eff, Matrix::Identity(d, d));
}

// ============================================================
// Two-parameter transition table
// ============================================================

/// Table of transitions U(t_i, t_j), i >= j, over a grid. Entries are built
/// by composing one-interval factors, so the composition law holds down to
/// floating-point reassociation and checking it validates assembly rather
/// than the integrator.
class Propagator {
  public:
    static Propagator build(const OperatorFamily& family, const Grid& grid,
                            const PropagatorOptions& opts = {}) {
        if (grid.size() < 2) throw input_error("transition table needs at least two grid points");
        if (opts.n_sub < 1) throw input_error("substep count must be positive");
        if (grid.points.front() < -1e-12 || grid.points.back() > 1.0 + 1e-12)
            throw input_error("grid must lie inside [0,1]");

        Propagator p;
        p.grid_ = grid;
        p.dim_ = family.dim;
        p.dissipative_ = family.dissipative;
        p.opts_ = opts;
        const int m = grid.size();

        std::vector<Matrix> factors(static_cast<std::size_t>(m - 1));
        parallel_for(m - 1, [&](int j) {
            const double a = grid[j];
            const double b = grid[j + 1];
            factors[static_cast<std::size_t>(j)] =
                opts.method == StepMethod::frozen ? frozen_product(family, a, b, opts.n_sub)
                                                  : reference_rk4(family, a, b, opts.n_sub);
        });

        p.table_.resize(p.pair_count());
        parallel_for(m, [&](int j) {
            Matrix acc = Matrix::Identity(p.dim_, p.dim_);
            p.table_[p.index(j, j)] = acc;
            for (int i = j + 1; i < m; ++i) {
                acc = factors[static_cast<std::size_t>(i - 1)] * acc;
                p.table_[p.index(i, j)] = acc;
            }
        });
        return p;
    }

    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] int dim() const { return dim_; }

    /// U(t, s) for grid points t >= s.
    [[nodiscard]] const Matrix& transition(double t, double s) const {
        const int i = grid_.index_of(t);
        const int j = grid_.index_of(s);
        if (i < 0 || j < 0) throw input_error("transition endpoints must be grid points");
        if (i < j) throw input_error("transition runs forward in time: need t >= s");
        return table_[index(i, j)];
    }

    [[nodiscard]] Vector apply(double t, double s, const Vector& x) const {
        if (x.size() != dim_) throw input_error("state dimension mismatch");
        return transition(t, s) * x;
    }

    /// Identity, composition, norm and differential-equation checks on the
    /// stored table.
    [[nodiscard]] AxiomReport verify_axioms(const OperatorFamily& family) const {
        AxiomReport rep;
        rep.tol_cocycle = opts_.tol_cocycle;
        rep.tol_contraction = opts_.tol_contraction;
        const int m = grid_.size();

        double ident = 0.0;
        for (int j = 0; j < m; ++j)
            ident = std::max(ident,
                             (table_[index(j, j)] - Matrix::Identity(dim_, dim_)).norm());
        rep.identity_residual = ident;

        // Composition over index triples, strided so the count stays modest.
        const int stride = std::max(1, (m + 32) / 33);
        double coc = 0.0;
        for (int r = 0; r < m; r += stride)
            for (int s = r; s < m; s += stride)
                for (int t = s; t < m; t += stride) {
                    const Matrix lhs = table_[index(t, s)] * table_[index(s, r)];
                    coc = std::max(coc, spectral_norm(lhs - table_[index(t, r)]));
                }
        rep.cocycle_residual = coc;

        rep.contraction_applicable = dissipative_;
        if (dissipative_) {
            double worst = 0.0;
            for (int j = 0; j < m; ++j)
                for (int i = j; i < m; ++i)
                    worst = std::max(worst, spectral_norm(table_[index(i, j)]));
            rep.contraction_max = worst;
        }

        // Central-difference residual of U'(., t_0) = A(.) U(., t_0), with a
        // tolerance calibrated from third differences of the table itself.
        bool solution_ok = true;
        if (m >= 4) {
            const double h = grid_.step();
            double res_max = 0.0;
            double tol_max = 0.0;
            double col_scale = 0.0;
            for (int i = 0; i < m; ++i)
                col_scale = std::max(col_scale, table_[index(i, 0)].norm());
            for (int i = 1; i + 1 < m; ++i) {
                const Matrix diff =
                    (table_[index(i + 1, 0)] - table_[index(i - 1, 0)]) / (2.0 * h);
                const Matrix res = diff - family.eval(grid_[i]) * table_[index(i, 0)];
                // Third-difference curvature scale, maximised over every
                // window covering the point so that sign changes of the third
                // derivative inside one window cannot starve the tolerance.
                double m3 = 0.0;
                for (int j0 = std::max(0, i - 3); j0 <= std::min(i, m - 4); ++j0) {
                    const Matrix third = table_[index(j0 + 3, 0)] -
                                         3.0 * table_[index(j0 + 2, 0)] +
                                         3.0 * table_[index(j0 + 1, 0)] -
                                         table_[index(j0, 0)];
                    m3 = std::max(m3, third.norm() / (h * h * h));
                }
                const double tol = 4.0 * (h * h / 6.0) * m3 + 1e-9 * (1.0 + col_scale);
                const double r = res.norm();
                res_max = std::max(res_max, r);
                tol_max = std::max(tol_max, tol);
                if (r > tol) solution_ok = false;
            }
            rep.solution_residual_max = res_max;
            rep.solution_tol_max = tol_max;
        } else {
            rep.notes.push_back("grid too coarse for the differential-equation residual");
        }

        bool ok = ident <= 1e-14 && coc <= opts_.tol_cocycle && solution_ok;
        if (dissipative_ && rep.contraction_max > 1.0 + opts_.tol_contraction) ok = false;
        if (!solution_ok)
            rep.notes.push_back("columns fail the differential equation at the "
                                "calibrated tolerance");
        rep.verdict = ok ? Verdict::pass : Verdict::fail;
        return rep;
    }

  private:
    Grid grid_;
    int dim_ = 0;
    bool dissipative_ = false;
    PropagatorOptions opts_;
    std::vector<Matrix> table_;

    [[nodiscard]] std::size_t pair_count() const {
        const auto m = static_cast<std::size_t>(grid_.size());
        return m * (m + 1) / 2;
    }

    /// Packed index for i >= j: column j occupies a contiguous block.
    [[nodiscard]] std::size_t index(int i, int j) const {
        const auto m = static_cast<std::size_t>(grid_.size());
        const auto jj = static_cast<std::size_t>(j);
        const std::size_t offset = jj * m - jj * (jj - 1) / 2;
        return offset + static_cast<std::size_t>(i - j);
    }
};

// ============================================================
// Initial value problems
// ============================================================

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
};

/// March x' = A(t) x from (s, y0) across the grid points at or after s.
/// Defaults to the high-order reference integrator.
[[nodiscard]] inline Trajectory solve_ivp(const OperatorFamily& family, double s,
                                          const Vector& y0, const Grid& grid,
                                          const PropagatorOptions& opts = {StepMethod::rk4}) {
    if (y0.size() != family.dim) throw input_error("initial state dimension mismatch");
    const int j0 = grid.index_of(s);
    if (j0 < 0) throw input_error("initial time must be a grid point");
    Trajectory traj;
    Vector x = y0;
    traj.times.push_back(grid[j0]);
    traj.states.push_back(x);
    for (int i = j0 + 1; i < grid.size(); ++i) {
        const double a = grid[i - 1];
        const double b = grid[i];
        if (opts.method == StepMethod::frozen) {
            x = frozen_product(family, a, b, opts.n_sub) * x;
        } else {
            const int n_eff = detail::guarded_steps(family, a, b, opts.n_sub);
            x = detail::rk4_march<Vector>(family, a, b, n_eff, x);
        }
        traj.times.push_back(b);
        traj.states.push_back(x);
    }
    return traj;
}

/// Largest central-difference defect of x' = A(t) x along a trajectory,
/// with the same self-calibrated tolerance as the table check. Returns
/// {max residual, max tolerance, pass}.
struct TrajectoryResidual {
    double residual_max = 0.0;
    double tol_max = 0.0;
    bool ok = true;
};

[[nodiscard]] inline TrajectoryResidual trajectory_residual(const OperatorFamily& family,
                                                            const Trajectory& traj) {
    TrajectoryResidual out;
    const auto m = static_cast<int>(traj.times.size());
    if (m < 4) return out;
    double scale = 0.0;
    for (const auto& v : traj.states) scale = std::max(scale, v.norm());
    for (int i = 1; i + 1 < m; ++i) {
        const double h = 0.5 * (traj.times[static_cast<std::size_t>(i + 1)] -
                                traj.times[static_cast<std::size_t>(i - 1)]);
        const Vector diff = (traj.states[static_cast<std::size_t>(i + 1)] -
                             traj.states[static_cast<std::size_t>(i - 1)]) /
                            (2.0 * h);
        const Vector res =
            diff - family.eval(traj.times[static_cast<std::size_t>(i)]) *
                       traj.states[static_cast<std::size_t>(i)];
        double m3 = 0.0;
        for (int j0 = std::max(0, i - 3); j0 <= std::min(i, m - 4); ++j0) {
            const Vector third = traj.states[static_cast<std::size_t>(j0 + 3)] -
                                 3.0 * traj.states[static_cast<std::size_t>(j0 + 2)] +
                                 3.0 * traj.states[static_cast<std::size_t>(j0 + 1)] -
                                 traj.states[static_cast<std::size_t>(j0)];
            m3 = std::max(m3, third.norm() / (h * h * h));
        }
        const double tol = 4.0 * (h * h / 6.0) * m3 + 1e-9 * (1.0 + scale);
        out.residual_max = std::max(out.residual_max, res.norm());
        out.tol_max = std::max(out.tol_max, tol);
        if (res.norm() > tol) out.ok = false;
    }
    return out;
}

/// CSV dump with full round-trip precision.
/// Per-point defect ||x'(t_i) - A(t_i) x(t_i)|| with a central difference in
/// the interior and one-sided second-order stencils at the ends. Short
/// trajectories (< 3 points) report zeros.
[[nodiscard]] inline std::vector<double> pointwise_residuals(const OperatorFamily& family,
                                                             const Trajectory& traj) {
    const std::size_t m = traj.times.size();
    std::vector<double> res(m, 0.0);
    if (m < 3) return res;
    for (std::size_t i = 0; i < m; ++i) {
        Vector diff;
        if (i == 0) {
            const double h = traj.times[1] - traj.times[0];
            diff = (-3.0 * traj.states[0] + 4.0 * traj.states[1] - traj.states[2]) /
                   (2.0 * h);
        } else if (i + 1 == m) {
            const double h = traj.times[m - 1] - traj.times[m - 2];
            diff = (3.0 * traj.states[m - 1] - 4.0 * traj.states[m - 2] +
                    traj.states[m - 3]) /
                   (2.0 * h);
        } else {
            const double h2 = traj.times[i + 1] - traj.times[i - 1];
            diff = (traj.states[i + 1] - traj.states[i - 1]) / h2;
        }
        res[i] = (diff - family.eval(traj.times[i]) * traj.states[i]).norm();
    }
    return res;
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                                 const std::vector<double>& residuals = {}) {
    if (!residuals.empty() && residuals.size() != traj.times.size())
        throw input_error("residual column length does not match the trajectory");
    std::ofstream out(path);
    if (!out) throw input_error("cannot open '" + path + "' for writing");
    const int d = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
    out << "t";
    for (int c = 0; c < d; ++c) out << ",x_" << (c + 1);
    if (!residuals.empty()) out << ",residual";
    out << "\n";
    char buf[64];
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", traj.times[i]);
        out << buf;
        for (int c = 0; c < d; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", traj.states[i](c));
            out << "," << buf;
        }
        if (!residuals.empty()) {
            std::snprintf(buf, sizeof(buf), "%.17g", residuals[i]);
            out << "," << buf;
        }
        out << "\n";
    }
    if (!out) throw input_error("failed while writing '" + path + "'");
}

} // namespace evolveq
