#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <json.hpp>

#include "evolveq/errors.hpp"
#include "evolveq/linalg.hpp"

namespace evolveq {

/// Shared knobs of the three condition suites. All absolute tolerances are
/// interpreted relative to scale = sup_t ||A(t)||, so the same config works
/// for a 1d scalar family and a stiff d = 64 discrete Laplacian.
struct CheckConfig {
    /// Grid resolution; must be dyadic (2^m + 1 points) so variation sums can
    /// be compared across coarsenings that share nodes.
    int grid_n = 129;
    /// Random unit probe vectors added on top of the canonical basis.
    int extra_probes = 8;
    /// Difference-quotient ladder; strictly increasing, last rung twice the
    /// one before it (the two finest rungs form the limit estimate).
    std::vector<int> k_ladder = {8, 16, 32, 64, 128, 256, 512, 1024};
    /// Base tolerance, scaled by sup ||A(t)|| before use.
    double tol_abs = 1e-6;
    /// Minimal acceptable decay rate of quotient errors (exponent of 1/k).
    double rate_min = 0.8;
    /// Seed for the probe vectors; fixed so reports are reproducible.
    std::uint64_t seed = 42;
    /// Relative stabilization tolerance for dyadic variation sums.
    double tol_rel = 0.05;
    /// Error tails may sit this many multiples of scale/k above zero.
    double tail_mult = 10.0;
    /// Step for the finite-difference derivative scans.
    double fd_step = 1.0 / 1024.0;
    /// Number of delta rungs in each sampled modulus of continuity.
    int moduli_levels = 4;

    void validate() const {
        if (grid_n < 5) throw input_error("grid_n must be at least 5");
        const int intervals = grid_n - 1;
        if ((intervals & (intervals - 1)) != 0)
            throw input_error("grid_n must be dyadic (2^m + 1 points)");
        if (k_ladder.size() < 4)
            throw input_error("k_ladder needs at least 4 rungs");
        for (std::size_t i = 0; i < k_ladder.size(); ++i) {
            if (k_ladder[i] < 2) throw input_error("k_ladder rungs must be >= 2");
            if (i > 0 && k_ladder[i] <= k_ladder[i - 1])
                throw input_error("k_ladder must be strictly increasing");
        }
        const std::size_t n = k_ladder.size();
        if (k_ladder[n - 1] != 2 * k_ladder[n - 2])
            throw input_error("the last k_ladder rung must double the one before it");
        if (!(tol_abs > 0.0) || !(tol_rel > 0.0))
            throw input_error("tolerances must be positive");
        if (!(rate_min > 0.0 && rate_min < 4.0))
            throw input_error("rate_min must lie in (0, 4)");
        if (!(tail_mult >= 1.0)) throw input_error("tail_mult must be >= 1");
        if (!(fd_step > 0.0 && fd_step <= 0.125))
            throw input_error("fd_step must lie in (0, 1/8]");
        if (moduli_levels < 3 || moduli_levels > 8)
            throw input_error("moduli_levels must lie in [3, 8]");
        if (extra_probes < 0) throw input_error("extra_probes must be >= 0");
    }

    /// Canonical basis plus extra_probes random unit vectors. Gaussian
    /// components come from a hand-rolled Box-Muller on mt19937_64 so the
    /// probe set is identical on every standard library.
    [[nodiscard]] std::vector<Vector> probe_vectors(int dim) const {
        if (dim < 1) throw input_error("probe dimension must be >= 1");
        std::vector<Vector> probes;
        probes.reserve(static_cast<std::size_t>(dim + extra_probes));
        for (int i = 0; i < dim; ++i) {
            Vector e = Vector::Zero(dim);
            e(i) = 1.0;
            probes.push_back(std::move(e));
        }
        std::mt19937_64 rng(seed);
        const auto uniform01 = [&rng]() {
            // 53-bit mantissa draw in (0, 1]; avoids log(0) below.
            return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
        };
        for (int p = 0; p < extra_probes; ++p) {
            Vector v(dim);
            for (int i = 0; i < dim; i += 2) {
                const double r = std::sqrt(-2.0 * std::log(uniform01()));
                const double a = 2.0 * 3.141592653589793238462643383279502884 * uniform01();
                v(i) = r * std::cos(a);
                if (i + 1 < dim) v(i + 1) = r * std::sin(a);
            }
            const double norm = v.norm();
            if (norm < 1e-8) {
                v.setZero();
                v(p % dim) = 1.0;
                probes.push_back(std::move(v));
                continue;
            }
            probes.push_back(v / norm);
        }
        return probes;
    }

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["grid_n"] = grid_n;
        j["extra_probes"] = extra_probes;
        j["k_ladder"] = k_ladder;
        j["tol_abs"] = tol_abs;
        j["rate_min"] = rate_min;
        j["seed"] = seed;
        j["tol_rel"] = tol_rel;
        j["tail_mult"] = tail_mult;
        j["fd_step"] = fd_step;
        j["moduli_levels"] = moduli_levels;
        return j;
    }
};

} // namespace evolveq
