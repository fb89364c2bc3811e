#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "evolveq/catalog.hpp"
#include "evolveq/check_config.hpp"
#include "evolveq/errors.hpp"
#include "evolveq/grid.hpp"
#include "evolveq/linalg.hpp"
#include "evolveq/operator_family.hpp"
#include "evolveq/parallel.hpp"
#include "evolveq/reports.hpp"

namespace evolveq {

namespace detail {

/// Spectral norm with a cheaper symmetric-product path for larger matrices.
[[nodiscard]] inline double op_norm(const Matrix& m) {
    if (m.rows() <= 16) return spectral_norm(m);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Least-squares exponent r of e ~ c k^-r over the last <= 3 entries.
[[nodiscard]] inline double fit_decay_rate(const std::vector<ConvergenceEntry>& entries,
                                           double floor_value) {
    const std::size_t n = entries.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t lo = n > 3 ? n - 3 : 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = lo; i < n; ++i) {
        const double x = std::log(static_cast<double>(entries[i].k));
        const double y = std::log(std::max(entries[i].sup_error, floor_value));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    const double denom = m * sxx - sx * sx;
    if (denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return -(m * sxy - sx * sy) / denom;
}

// ============================================================================
// Sampled modulus of continuity with a decay-ratio jump test
// ============================================================================

// The finest rung is excluded from the decision: when a jump sits exactly on
// a sample, that sample takes an intermediate value and the one-step modulus
// sees only half the jump (a staircase artifact). Rungs 2, 4, 8 steps wide
// always bracket the jump with clean pairs.
inline constexpr double kModulusRatioPass = 0.45;
inline constexpr double kModulusRatioFail = 0.70;

struct ModulusOutcome {
    ModulusTable table;
    Verdict verdict = Verdict::inconclusive;
    double ratio = std::numeric_limits<double>::quiet_NaN();
    double floor = 0.0;
};

/// Modulus of a matrix-valued path sampled on uniformly spaced times.
/// omega(delta) decays with delta for a continuous path and stagnates at the
/// jump size across a discontinuity; the verdict compares the 2-step rung
/// against the coarsest rung.
[[nodiscard]] inline ModulusOutcome modulus_of_path(const std::string& name,
                                                    const std::vector<double>& times,
                                                    const std::vector<Matrix>& values,
                                                    int levels, double floor_value) {
    ModulusOutcome out;
    out.table.name = name;
    out.floor = floor_value;
    const std::size_t n = values.size();
    if (n < (std::size_t{1} << levels) || times.size() != n)
        throw input_error("modulus needs at least 2^levels samples");
    const double spacing = times[1] - times[0];
    for (int lvl = 0; lvl < levels; ++lvl) {
        const std::size_t stride = std::size_t{1} << lvl;
        double omega = 0.0;
        double where = times[0];
        for (std::size_t i = 0; i + stride < n; ++i) {
            const double diff = (values[i + stride] - values[i]).norm();
            if (diff > omega) {
                omega = diff;
                where = 0.5 * (times[i] + times[i + stride]);
            }
        }
        out.table.deltas.push_back(spacing * static_cast<double>(stride));
        out.table.omegas.push_back(omega);
        if (lvl == 1) out.table.worst_location = where;
    }
    const double w1 = out.table.omegas[1];
    const double w_last = out.table.omegas[levels - 1];
    out.table.extrapolated = std::max(0.0, 2.0 * w1 - out.table.omegas[std::min(2, levels - 1)]);
    out.ratio = w_last > 0.0 ? w1 / w_last
                             : (w1 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (w1 <= floor_value || out.ratio <= kModulusRatioPass)
        out.verdict = Verdict::pass;
    else if (out.ratio >= kModulusRatioFail)
        out.verdict = Verdict::fail;
    else
        out.verdict = Verdict::inconclusive;
    return out;
}

// ============================================================================
// Richardson finite-difference derivative scan
// ============================================================================

struct DerivativeScan {
    std::vector<double> times;    // grid nodes plus cell midpoints
    std::vector<Matrix> values;   // extrapolated derivative estimates
    std::vector<double> errors;   // per-point extrapolation error estimates
    double sup_norm = 0.0;        // sup of ||estimate|| (spectral)
    double max_error = 0.0;
    std::vector<double> bad_times;  // error estimate above tolerance
};

/// Differentiates a matrix-valued map at the grid nodes and cell midpoints.
/// Central differences at steps h and h/2 are Richardson-combined; near the
/// interval ends a one-sided three-point stencil of the same order takes
/// over. The spread of the two stencils is the error estimate, so a point
/// where the map is not C^1 flags itself.
template <typename F>
[[nodiscard]] DerivativeScan scan_derivative(F&& map, const Grid& grid, double h,
                                             double tol) {
    DerivativeScan scan;
    const std::size_t cells = grid.intervals();
    scan.times.reserve(2 * cells + 1);
    for (std::size_t i = 0; i < cells; ++i) {
        scan.times.push_back(grid[i]);
        scan.times.push_back(0.5 * (grid[i] + grid[i + 1]));
    }
    scan.times.push_back(grid[cells]);

    const std::size_t n = scan.times.size();
    scan.values.assign(n, Matrix());
    scan.errors.assign(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        const double t = scan.times[i];
        const auto stencil = [&](double step) -> Matrix {
            if (t - step < 0.0)
                return (-3.0 * map(t) + 4.0 * map(t + step) - map(t + 2.0 * step)) /
                       (2.0 * step);
            if (t + step > 1.0)
                return (3.0 * map(t) - 4.0 * map(t - step) + map(t - 2.0 * step)) /
                       (2.0 * step);
            return (map(t + step) - map(t - step)) / (2.0 * step);
        };
        const Matrix coarse = stencil(h);
        const Matrix fine = stencil(0.5 * h);
        scan.values[i] = (4.0 * fine - coarse) / 3.0;
        scan.errors[i] = (fine - coarse).norm() / 3.0;
    });
    for (std::size_t i = 0; i < n; ++i) {
        scan.sup_norm = std::max(scan.sup_norm, op_norm(scan.values[i]));
        scan.max_error = std::max(scan.max_error, scan.errors[i]);
        if (scan.errors[i] > tol) scan.bad_times.push_back(scan.times[i]);
    }
    return scan;
}

[[nodiscard]] inline std::string part_name(Verdict v) { return to_string(v); }

inline void merge_loci(std::vector<double>& into, const std::vector<double>& from) {
    into.insert(into.end(), from.begin(), from.end());
    std::sort(into.begin(), into.end());
    into.erase(std::unique(into.begin(), into.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               into.end());
}

[[nodiscard]] inline Verdict combine_parts(const std::map<std::string, std::string>& parts) {
    bool inconclusive = false;
    for (const auto& [key, value] : parts) {
        if (value == "fail") return Verdict::fail;
        if (value != "pass") inconclusive = true;
    }
    return inconclusive ? Verdict::inconclusive : Verdict::pass;
}

} // namespace detail

// ============================================================================
// Difference-quotient series k C(t, t - 1/k) and its Richardson limit
// ============================================================================

/// Difference quotients of the multiplicative increments, evaluated on the
/// uniform lattice {j / k_max}. Using a lattice this fine is what lets the
/// error suprema see structure between grid nodes (a kink half a lattice
/// step away from every coarser probe would otherwise go unsampled).
struct QuotientSeries {
    std::vector<double> times;              //  j / k_max for j = 2 .. k_max
    std::vector<Matrix> limit;              //  2 v_K(t) - v_{K/2}(t)
    Matrix boundary_quotient;               //  v_K(1 / k_max), the rawest boundary value
    std::vector<ConvergenceEntry> errors;   //  scored rungs: sup_t ||v_k(t) - limit(t)||_F
    std::vector<double> error_locations;    //  argmax t per scored rung
    double scale = 1.0;                     //  max(1, sup ||limit||_F)
    double floor = 0.0;                     //  roundoff floor for the errors
};

/// Builds v_k(t) = k (A(t) A(t - 1/k)^-1 - 1) for every ladder rung, forms
/// the limit estimate from the two finest rungs, and scores the rest
/// against it. Scoring the rungs that feed the limit estimate would only
/// measure their correlation, so they are excluded.
[[nodiscard]] inline QuotientSeries quotient_series(const OperatorFamily& family,
                                                    const CheckConfig& cfg = {}) {
    cfg.validate();
    if (!family.invertible)
        throw input_error("difference quotients need an invertible family");
    const int k_max = cfg.k_ladder.back();
    const int k_half = cfg.k_ladder[cfg.k_ladder.size() - 2];
    const std::size_t lattice_n = static_cast<std::size_t>(k_max) + 1;
    const double step = 1.0 / k_max;

    std::vector<Matrix> a(lattice_n), a_inv(lattice_n);
    parallel_for(lattice_n, [&](std::size_t j) {
        const double t = static_cast<double>(j) * step;
        a[j] = family.eval(t);
        a_inv[j] = GuardedSolver(a[j], t, family.kappa_max, "A(t)").inverse();
    });

    const Matrix id = Matrix::Identity(family.dim, family.dim);
    const auto quotient = [&](int k, std::size_t j) -> Matrix {
        const std::size_t back = j - static_cast<std::size_t>(k_max / k);
        return static_cast<double>(k) * (a[j] * a_inv[back] - id);
    };

    QuotientSeries series;
    series.boundary_quotient = quotient(k_max, 1);
    series.times.reserve(lattice_n - 2);
    series.limit.assign(lattice_n - 2, Matrix());
    parallel_for(lattice_n - 2, [&](std::size_t i) {
        const std::size_t j = i + 2;
        series.limit[i] = 2.0 * quotient(k_max, j) - quotient(k_half, j);
    });
    double sup_limit = 0.0;
    for (std::size_t i = 0; i + 2 < lattice_n; ++i) {
        series.times.push_back(static_cast<double>(i + 2) * step);
        sup_limit = std::max(sup_limit, series.limit[i].norm());
    }
    series.scale = std::max(1.0, sup_limit);
    series.floor = 1e3 * std::numeric_limits<double>::epsilon() *
                   static_cast<double>(k_max) * series.scale;

    for (std::size_t r = 0; r + 2 < cfg.k_ladder.size(); ++r) {
        const int k = cfg.k_ladder[r];
        std::vector<double> errs(lattice_n - 2, 0.0);
        parallel_for(lattice_n - 2, [&](std::size_t i) {
            const std::size_t j = i + 2;
            if (static_cast<double>(j) * step < 1.0 / k - 1e-15) return;
            errs[i] = (quotient(k, j) - series.limit[i]).norm();
        });
        double worst = 0.0;
        double where = series.times.front();
        for (std::size_t i = 0; i + 2 < lattice_n; ++i) {
            if (errs[i] > worst) {
                worst = errs[i];
                where = series.times[i];
            }
        }
        series.errors.push_back({k, worst});
        series.error_locations.push_back(where);
    }
    return series;
}

// ============================================================================
// Condition suite: C^1 regularity of t -> A(t)
// ============================================================================

/// Two prongs: the Richardson scan flags points where the two stencil widths
/// disagree (derivative does not settle), and the modulus of the estimated
/// derivative path flags jumps the scan cannot see. A kink sitting exactly
/// on a sample cancels symmetrically inside a central difference, so only
/// the modulus prong can convict it; that is why both prongs are required.
[[nodiscard]] inline ConditionReport check_c1(const OperatorFamily& family,
                                              const CheckConfig& cfg = {}) {
    cfg.validate();
    ConditionReport report;
    report.suite = "c1";
    const Grid grid = Grid::uniform(cfg.grid_n);
    const double scale = family.scale_on(grid);
    const double tol_eff = cfg.tol_abs * std::max(scale, 1.0);
    const double modulus_floor = 10.0 * tol_eff;
    report.tolerances_used = cfg.to_json();
    report.tolerances_used["scale"] = scale;
    report.tolerances_used["tol_eff"] = tol_eff;
    report.tolerances_used["modulus_floor"] = modulus_floor;
    report.tolerances_used["modulus_ratio_pass"] = detail::kModulusRatioPass;
    report.tolerances_used["modulus_ratio_fail"] = detail::kModulusRatioFail;

    try {
        const auto scan = detail::scan_derivative(
            [&](double t) { return family.eval(t); }, grid, cfg.fd_step, tol_eff);
        report.bounds["sup_dA"] = scan.sup_norm;
        report.bounds["scan_error_max"] = scan.max_error;
        const bool scan_ok = scan.bad_times.empty();
        report.parts["derivative"] = scan_ok ? "pass" : "fail";
        if (!scan_ok) detail::merge_loci(report.failure_loci, scan.bad_times);

        auto mod = detail::modulus_of_path("derivative path of A", scan.times, scan.values,
                                           cfg.moduli_levels, modulus_floor);
        report.parts["modulus"] = detail::part_name(mod.verdict);
        if (mod.verdict == Verdict::fail)
            detail::merge_loci(report.failure_loci, {mod.table.worst_location});
        report.moduli.push_back(std::move(mod.table));

        if (family.derivative_available()) {
            double worst = 0.0;
            for (std::size_t i = 0; i < scan.times.size(); ++i)
                worst = std::max(
                    worst, (scan.values[i] - family.derivative_at(scan.times[i])).norm());
            report.bounds["oracle_residual"] = worst;
            report.notes.push_back(
                "closed-form derivative available; scan estimates cross-checked against it");
        }
        report.verdict = detail::combine_parts(report.parts);
    } catch (const breakdown_error& e) {
        report.verdict = Verdict::inconclusive;
        report.notes.push_back(std::string("solver breakdown: ") + e.what());
        report.failure_loci = {e.t};
    }
    report.notes.push_back(
        "derivative estimates at grid nodes and cell midpoints; suprema are over samples, "
        "not all of [0,1]");
    return report;
}

// ============================================================================
// Condition suite: boundedness / variation / differentiability of B(t,s)
// ============================================================================

/// Part (i) bounds B over the sampled square, part (ii) watches dyadic
/// variation sums of t -> B(t,0) stabilize under refinement, part (iii)
/// runs the same two-prong derivative scan as the C^1 suite on B(.,0).
[[nodiscard]] inline ConditionReport check_kato53(const OperatorFamily& family,
                                                  const CheckConfig& cfg = {}) {
    cfg.validate();
    ConditionReport report;
    report.suite = "kato53";
    const Grid grid = Grid::uniform(cfg.grid_n);
    const double scale = family.scale_on(grid);
    const double tol_eff = cfg.tol_abs * std::max(scale, 1.0);
    const double modulus_floor = 10.0 * tol_eff;
    report.tolerances_used = cfg.to_json();
    report.tolerances_used["scale"] = scale;
    report.tolerances_used["tol_eff"] = tol_eff;
    report.tolerances_used["modulus_floor"] = modulus_floor;
    report.tolerances_used["variation_tol_rel"] = cfg.tol_rel;

    try {
        const std::size_t n = grid.size();
        const Matrix id = Matrix::Identity(family.dim, family.dim);
        std::vector<Matrix> left(n);          // 1 - A(t_i)
        std::vector<Matrix> right_inv(n);     // (1 - A(t_i))^-1
        parallel_for(n, [&](std::size_t i) {
            left[i] = id - family.eval(grid[i]);
            right_inv[i] =
                GuardedSolver(left[i], grid[i], family.kappa_max, "1 - A(s)").inverse();
        });

        // (i) sup over the sampled square of ||B(t,s)||.
        std::vector<double> row_max(n, 0.0);
        std::vector<std::size_t> row_arg(n, 0);
        parallel_for(n, [&](std::size_t i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double v = detail::op_norm(left[i] * right_inv[j]);
                if (v > row_max[i]) {
                    row_max[i] = v;
                    row_arg[i] = j;
                }
            }
        });
        double sup_b = 0.0;
        std::size_t arg_i = 0, arg_j = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (row_max[i] > sup_b) {
                sup_b = row_max[i];
                arg_i = i;
                arg_j = row_arg[i];
            }
        }
        report.bounds["sup_B"] = sup_b;
        report.bounds["sup_B_t"] = grid[arg_i];
        report.bounds["sup_B_s"] = grid[arg_j];
        report.parts["i"] = "pass";

        // (ii) dyadic variation sums of t -> B(t,0) at the three finest
        // levels. Refinement can only raise the sum; a genuine bounded
        // variation shows shrinking increments, unbounded variation shows
        // increments that refuse to decay.
        const int level = grid.dyadic_level();
        std::vector<Matrix> b_col(n);
        for (std::size_t i = 0; i < n; ++i) b_col[i] = left[i] * right_inv[0];
        const auto variation_at = [&](int lvl) {
            const std::size_t stride = std::size_t{1} << (level - lvl);
            double v = 0.0;
            for (std::size_t i = 0; i + stride < n; i += stride)
                v += detail::op_norm(b_col[i + stride] - b_col[i]);
            return v;
        };
        const double v_coarse = variation_at(level - 2);
        const double v_mid = variation_at(level - 1);
        const double v_fine = variation_at(level);
        const double d1 = v_mid - v_coarse;
        const double d2 = v_fine - v_mid;
        const double var_floor = 1e-9 * (1.0 + sup_b);
        report.bounds["variation_N"] = v_fine;
        report.bounds["variation_increment"] = d2;
        {
            char line[160];
            std::snprintf(line, sizeof line,
                          "variation sums at the three finest dyadic levels: %.6g, %.6g, %.6g",
                          v_coarse, v_mid, v_fine);
            report.notes.push_back(line);
        }
        if (d2 <= cfg.tol_rel * std::max(v_fine, var_floor))
            report.parts["ii"] = "pass";
        else if (d2 >= (1.0 - cfg.tol_rel) * d1)
            report.parts["ii"] = "fail";
        else
            report.parts["ii"] = "inconclusive";

        // (iii) derivative scan of t -> B(t,0), same two prongs as check_c1.
        const Matrix r0 = right_inv[0];
        const auto scan = detail::scan_derivative(
            [&](double t) -> Matrix { return (id - family.eval(t)) * r0; }, grid,
            cfg.fd_step, tol_eff);
        report.bounds["sup_dB"] = scan.sup_norm;
        report.bounds["scan_error_max"] = scan.max_error;
        const bool scan_ok = scan.bad_times.empty();
        auto mod = detail::modulus_of_path("derivative path of B(.,0)", scan.times,
                                           scan.values, cfg.moduli_levels, modulus_floor);
        if (scan_ok && mod.verdict == Verdict::pass)
            report.parts["iii"] = "pass";
        else if (!scan_ok || mod.verdict == Verdict::fail)
            report.parts["iii"] = "fail";
        else
            report.parts["iii"] = "inconclusive";
        if (!scan_ok) detail::merge_loci(report.failure_loci, scan.bad_times);
        if (mod.verdict == Verdict::fail)
            detail::merge_loci(report.failure_loci, {mod.table.worst_location});
        report.moduli.push_back(std::move(mod.table));

        report.verdict = detail::combine_parts(report.parts);
    } catch (const breakdown_error& e) {
        report.verdict = Verdict::inconclusive;
        report.notes.push_back(std::string("solver breakdown: ") + e.what());
        report.failure_loci = {e.t};
    }
    report.notes.push_back(
        "in finite dimension weak and strong derivatives of t -> B(t,s0) coincide, so "
        "differentiability is tested in the strong (matrix norm) sense");
    report.notes.push_back("base point s0 = 0; B(t,s) = B(t,s0) B(s0,s) carries the "
                           "conclusion to every other base point");
    return report;
}

// ============================================================================
// Condition suite: difference-quotient field Q and its uniform limit
// ============================================================================

/// Part (i) bounds the quotient field Q(t,s) = C(t,s)/(t-s) on off-diagonal
/// grid pairs and tests its continuity there (pairs straddling the diagonal
/// included), part (ii) measures how fast k C(t, t-1/k) converges to its
/// Richardson limit uniformly in t, part (iii) tests continuity of the
/// limit path. The matrix norm certifies uniformity over unit vectors x.
[[nodiscard]] inline ConditionReport check_yosida(const OperatorFamily& family,
                                                  const CheckConfig& cfg = {}) {
    cfg.validate();
    ConditionReport report;
    report.suite = "yosida";
    const Grid grid = Grid::uniform(cfg.grid_n);
    const double scale = family.scale_on(grid);
    const double tol_eff = cfg.tol_abs * std::max(scale, 1.0);
    const double modulus_floor = 10.0 * tol_eff;
    report.tolerances_used = cfg.to_json();
    report.tolerances_used["scale"] = scale;
    report.tolerances_used["tol_eff"] = tol_eff;
    report.tolerances_used["modulus_floor"] = modulus_floor;

    if (!family.invertible)
        throw input_error("the quotient suite needs an invertible family");

    try {
        const std::size_t n = grid.size();
        const Matrix id = Matrix::Identity(family.dim, family.dim);
        std::vector<Matrix> a(n), a_inv(n);
        parallel_for(n, [&](std::size_t i) {
            a[i] = family.eval(grid[i]);
            a_inv[i] = GuardedSolver(a[i], grid[i], family.kappa_max, "A(s)").inverse();
        });
        const auto q_at = [&](std::size_t i, std::size_t j) -> Matrix {
            return (a[i] * a_inv[j] - id) / (grid[i] - grid[j]);
        };

        // (i) sup and modulus of the Q field, streamed row by row. A ring
        // buffer of the last 2^(levels-1) rows keeps memory flat for large d.
        const int levels = cfg.moduli_levels;
        const std::size_t max_stride = std::size_t{1} << (levels - 1);
        std::vector<std::vector<Matrix>> ring(max_stride + 1);
        std::vector<double> omega(levels, 0.0), omega_where(levels, 0.0);
        double quotient_m = 0.0;
        double q_arg_t = 0.0, q_arg_s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto& row = ring[i % (max_stride + 1)];
            row.assign(n, Matrix());
            std::vector<double> norms(n, 0.0);
            parallel_for(n, [&](std::size_t j) {
                if (j == i) return;
                row[j] = q_at(i, j);
                norms[j] = detail::op_norm(row[j]);
            });
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                if (norms[j] > quotient_m) {
                    quotient_m = norms[j];
                    q_arg_t = grid[i];
                    q_arg_s = grid[j];
                }
                for (int lvl = 0; lvl < levels; ++lvl) {
                    const std::size_t stride = std::size_t{1} << lvl;
                    // shift in s within this row
                    if (j + stride < n && j + stride != i) {
                        const double diff = (row[j + stride] - row[j]).norm();
                        if (diff > omega[lvl]) {
                            omega[lvl] = diff;
                            omega_where[lvl] = grid[i];
                        }
                    }
                    // shift in t against an earlier row
                    if (i >= stride && i - stride != j) {
                        const auto& prev = ring[(i - stride) % (max_stride + 1)];
                        const double diff = (row[j] - prev[j]).norm();
                        if (diff > omega[lvl]) {
                            omega[lvl] = diff;
                            omega_where[lvl] = 0.5 * (grid[i] + grid[i - stride]);
                        }
                    }
                }
            }
        }
        report.bounds["quotient_M"] = quotient_m;
        report.bounds["quotient_M_t"] = q_arg_t;
        report.bounds["quotient_M_s"] = q_arg_s;
        ModulusTable field_table;
        field_table.name = "quotient field Q(t,s), off-diagonal grid pairs";
        for (int lvl = 0; lvl < levels; ++lvl) {
            field_table.deltas.push_back(grid.step() * static_cast<double>(1u << lvl));
            field_table.omegas.push_back(omega[lvl]);
        }
        field_table.extrapolated = std::max(0.0, 2.0 * omega[1] - omega[2]);
        field_table.worst_location = omega_where[1];
        const double field_ratio =
            omega[levels - 1] > 0.0
                ? omega[1] / omega[levels - 1]
                : (omega[1] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        Verdict field_verdict;
        if (omega[1] <= modulus_floor || field_ratio <= detail::kModulusRatioPass)
            field_verdict = Verdict::pass;
        else if (field_ratio >= detail::kModulusRatioFail)
            field_verdict = Verdict::fail;
        else
            field_verdict = Verdict::inconclusive;
        report.parts["i"] = detail::part_name(field_verdict);
        if (field_verdict == Verdict::fail)
            detail::merge_loci(report.failure_loci, {field_table.worst_location});
        report.moduli.push_back(std::move(field_table));

        // (ii) uniform convergence of the quotient series.
        const auto series = quotient_series(family, cfg);
        report.convergence = series.errors;
        report.fitted_rate = detail::fit_decay_rate(series.errors, series.floor / 10.0);
        const double e_last = series.errors.back().sup_error;
        const int k_last = series.errors.back().k;
        const double tail_cap = cfg.tail_mult * series.scale / static_cast<double>(k_last);
        report.tolerances_used["quotient_scale"] = series.scale;
        report.tolerances_used["quotient_floor"] = series.floor;
        report.tolerances_used["quotient_tail_cap"] = tail_cap;
        report.bounds["sup_limit"] = series.scale;
        if (e_last <= series.floor) {
            report.parts["ii"] = "pass";
            report.notes.push_back("quotient errors sit at the roundoff floor");
        } else {
            const bool rate_ok = report.fitted_rate >= cfg.rate_min;
            const bool tail_ok = e_last <= tail_cap;
            if (rate_ok && tail_ok) {
                report.parts["ii"] = "pass";
            } else if (!rate_ok && !tail_ok) {
                report.parts["ii"] = "fail";
                detail::merge_loci(report.failure_loci,
                                   {series.error_locations.back()});
                report.notes.push_back(
                    "quotient errors stagnate well above the tail cap; no uniform limit");
            } else {
                report.parts["ii"] = "inconclusive";
                report.notes.push_back(
                    rate_ok ? "quotient errors decay but have not reached the tail cap; "
                              "extend k_ladder"
                            : "quotient errors are small but the fitted rate is shallow; "
                              "extend k_ladder");
            }
        }

        // (iii) continuity of the limit path.
        auto mod = detail::modulus_of_path("quotient limit path", series.times,
                                           series.limit, cfg.moduli_levels, modulus_floor);
        report.parts["iii"] = detail::part_name(mod.verdict);
        if (mod.verdict == Verdict::fail)
            detail::merge_loci(report.failure_loci, {mod.table.worst_location});
        report.moduli.push_back(std::move(mod.table));

        // Boundary variant: does the limit settle toward t = 0? Compared at
        // t = 1/k, 2/k, 4/k for the finest k; the gate scales like the limit
        // path's own increments over such steps.
        const double boundary_cap =
            cfg.tail_mult * series.scale * 4.0 / static_cast<double>(cfg.k_ladder.back());
        const double c1_gap = (series.boundary_quotient - series.limit[0]).norm();
        const double c2_gap = (series.limit[0] - series.limit[2]).norm();
        const bool boundary_ok = std::max(c1_gap, c2_gap) <= boundary_cap;
        report.bounds["boundary_gap"] = std::max(c1_gap, c2_gap);
        report.tolerances_used["boundary_cap"] = boundary_cap;
        report.bounds["modified_variant"] =
            (report.parts["ii"] == "pass" && boundary_ok) ? 1.0 : 0.0;

        report.verdict = detail::combine_parts(report.parts);
    } catch (const breakdown_error& e) {
        report.verdict = Verdict::inconclusive;
        report.notes.push_back(std::string("solver breakdown: ") + e.what());
        report.failure_loci = {e.t};
    }
    report.notes.push_back(
        "matrix-norm suprema certify uniformity over all unit probe vectors at once");
    return report;
}

/// Boundary-limit variant of the quotient suite: true when the uniform
/// limit exists and its boundary values settle as t -> 0. Reads the flag
/// recorded by check_yosida.
[[nodiscard]] inline bool yosida_modified_flag(const OperatorFamily& family,
                                               const CheckConfig& cfg = {}) {
    const auto report = check_yosida(family, cfg);
    const auto it = report.bounds.find("modified_variant");
    return it != report.bounds.end() && it->second == 1.0;
}

// ============================================================================
// Equivalence harness
// ============================================================================

/// Runs the three suites on one catalog entry and compares verdicts. An
/// inconclusive suite never counts as disagreement; the empirical content
/// is that conclusive verdicts line up with each other and with the truth
/// table.
[[nodiscard]] inline EquivalenceReport equivalence_matrix(const CatalogEntry& entry,
                                                          const CheckConfig& cfg = {}) {
    EquivalenceReport eq;
    eq.kato53 = check_kato53(entry.family, cfg);
    eq.yosida = check_yosida(entry.family, cfg);
    eq.c1 = check_c1(entry.family, cfg);
    const Verdict a = eq.kato53.verdict;
    const Verdict b = eq.yosida.verdict;
    const Verdict c = eq.c1.verdict;
    if (a == Verdict::inconclusive || b == Verdict::inconclusive ||
        c == Verdict::inconclusive) {
        eq.agreement = "inconclusive";
    } else if (a == b && b == c) {
        eq.agreement = "agree";
        const bool pass = a == Verdict::pass;
        eq.truth_match = (pass == entry.truth.kato53 && pass == entry.truth.yosida &&
                          pass == entry.truth.c1);
    } else {
        eq.agreement = "disagree";
        eq.truth_match = false;
    }
    eq.details.push_back("kato53: " + to_string(a));
    eq.details.push_back("yosida: " + to_string(b));
    eq.details.push_back("c1: " + to_string(c));
    eq.details.push_back("family: " + entry.name);
    return eq;
}

// ============================================================================
// Algebraic diagnostics
// ============================================================================

/// sup over probe pairs and anchors of || B(t,s) - B(t,s0) B(s0,s) ||.
/// Exact algebraically, so anything above roundoff means the resolvent
/// plumbing is broken.
[[nodiscard]] inline double b_composition_residual(
    const OperatorFamily& family, int probe_n = 17,
    const std::vector<double>& anchors = {0.0, 0.5, 1.0}) {
    if (probe_n < 2) throw input_error("composition residual needs probe_n >= 2");
    const Grid probe = Grid::uniform(probe_n);
    const Matrix id = Matrix::Identity(family.dim, family.dim);
    const std::size_t n = probe.size();
    std::vector<Matrix> left(n), right_inv(n);
    for (std::size_t i = 0; i < n; ++i) {
        left[i] = id - family.eval(probe[i]);
        right_inv[i] = GuardedSolver(left[i], probe[i], family.kappa_max, "1 - A(s)").inverse();
    }
    std::vector<double> worst_at(anchors.size(), 0.0);
    parallel_for(anchors.size(), [&](std::size_t ai) {
        const double s0 = anchors[ai];
        const Matrix l0 = id - family.eval(s0);
        const Matrix r0 =
            GuardedSolver(l0, s0, family.kappa_max, "1 - A(s0)").inverse();
        for (std::size_t i = 0; i < n; ++i) {
            const Matrix through = left[i] * r0 * l0;
            for (std::size_t j = 0; j < n; ++j)
                worst_at[ai] = std::max(
                    worst_at[ai],
                    detail::op_norm(through * right_inv[j] - left[i] * right_inv[j]));
        }
    });
    double worst = 0.0;
    for (double w : worst_at) worst = std::max(worst, w);
    return worst;
}

/// sup over probe pairs of || B(b,s) - B(a,s) + Simpson(dA, a, b) (1-A(s))^-1 ||.
/// The t-derivative of B integrates back to its increments; Simpson quadrature
/// on the closed-form derivative drives the residual to quadrature accuracy.
[[nodiscard]] inline double b_increment_residual(const OperatorFamily& family,
                                                 int panels = 64, int probe_n = 9) {
    if (!family.derivative_available())
        throw derivative_unavailable("the increment residual needs a closed-form derivative");
    if (probe_n < 2) throw input_error("increment residual needs probe_n >= 2");
    const Grid probe = Grid::uniform(probe_n);
    const Matrix id = Matrix::Identity(family.dim, family.dim);
    const std::size_t n = probe.size();
    double worst = 0.0;
    for (std::size_t js = 0; js < n; ++js) {
        const double s = probe[js];
        const Matrix r_s =
            GuardedSolver(id - family.eval(s), s, family.kappa_max, "1 - A(s)").inverse();
        for (std::size_t ia = 0; ia < n; ++ia) {
            for (std::size_t ib = ia + 1; ib < n; ++ib) {
                const double lo = probe[ia];
                const double hi = probe[ib];
                const Matrix b_hi = (id - family.eval(hi)) * r_s;
                const Matrix b_lo = (id - family.eval(lo)) * r_s;
                const Matrix integral =
                    simpson([&](double tau) { return family.derivative_at(tau); }, lo, hi,
                            panels);
                worst = std::max(worst,
                                 detail::op_norm(b_hi - b_lo + integral * r_s));
            }
        }
    }
    return worst;
}

/// sup over probes of || (A(t) - A(s)) x - C(t,s) A(s) x ||: the increment
/// of f(t) = A(t) x is exactly C(t,s) applied to f(s).
[[nodiscard]] inline double increment_identity_residual(const OperatorFamily& family,
                                                        const CheckConfig& cfg = {},
                                                        int probe_n = 17) {
    cfg.validate();
    if (!family.invertible)
        throw input_error("the increment identity needs an invertible family");
    const Grid probe = Grid::uniform(probe_n);
    const auto probes = cfg.probe_vectors(family.dim);
    const std::size_t n = probe.size();
    const Matrix id = Matrix::Identity(family.dim, family.dim);
    double worst = 0.0;
    for (std::size_t js = 0; js < n; ++js) {
        const Matrix a_s = family.eval(probe[js]);
        const Matrix inv_s =
            GuardedSolver(a_s, probe[js], family.kappa_max, "A(s)").inverse();
        for (std::size_t it = 0; it < n; ++it) {
            if (it == js) continue;
            const Matrix a_t = family.eval(probe[it]);
            const Matrix c = a_t * inv_s - id;
            for (const auto& x : probes) {
                const Vector lhs = a_t * x - a_s * x;
                const Vector rhs = c * (a_s * x);
                worst = std::max(worst, (lhs - rhs).norm());
            }
        }
    }
    return worst;
}

/// sup over probe pairs of || Q(t,s) - (t-s)^-1 Simpson(dA, s, t) A(s)^-1 ||:
/// the quotient field is the averaged derivative times the resolvent.
[[nodiscard]] inline double quotient_integral_residual(const OperatorFamily& family,
                                                       int panels = 64, int probe_n = 9) {
    if (!family.derivative_available())
        throw derivative_unavailable("the quotient integral needs a closed-form derivative");
    if (!family.invertible)
        throw input_error("the quotient integral needs an invertible family");
    const Grid probe = Grid::uniform(probe_n);
    const Matrix id = Matrix::Identity(family.dim, family.dim);
    const std::size_t n = probe.size();
    double worst = 0.0;
    for (std::size_t js = 0; js < n; ++js) {
        const double s = probe[js];
        const Matrix inv_s =
            GuardedSolver(family.eval(s), s, family.kappa_max, "A(s)").inverse();
        for (std::size_t it = 0; it < n; ++it) {
            if (it == js) continue;
            const double t = probe[it];
            const Matrix q = (family.eval(t) * inv_s - id) / (t - s);
            const Matrix integral = simpson(
                [&](double tau) { return family.derivative_at(tau); }, s, t, panels);
            worst = std::max(worst, detail::op_norm(q - (integral / (t - s)) * inv_s));
        }
    }
    return worst;
}

} // namespace evolveq
