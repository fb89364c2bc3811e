#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "evolveq/errors.hpp"
#include "evolveq/linalg.hpp"

namespace evolveq {

/// A vector-valued path on (a subinterval of) [0,1], stored as samples.
/// When `closed_form` is set, `at` evaluates it exactly; otherwise `at`
/// returns the matching sample or interpolates linearly between neighbours.
/// Quotient and telescoping routines never interpolate silently; they insist
/// on grid alignment and use index arithmetic (see lemma.hpp).
class SampledPath {
  public:
    std::vector<double> times;
    std::vector<Vector> values;
    std::function<Vector(double)> closed_form;

    static SampledPath from_samples(std::vector<double> ts, std::vector<Vector> vs) {
        validate(ts, vs);
        SampledPath p;
        p.times = std::move(ts);
        p.values = std::move(vs);
        return p;
    }

    static SampledPath from_function(const std::function<Vector(double)>& fn,
                                     std::vector<double> ts) {
        if (!fn) throw input_error("path function must be callable");
        std::vector<Vector> vs;
        vs.reserve(ts.size());
        for (double t : ts) vs.push_back(fn(t));
        validate(ts, vs);
        SampledPath p;
        p.times = std::move(ts);
        p.values = std::move(vs);
        p.closed_form = fn;
        return p;
    }

    [[nodiscard]] int dim() const {
        return values.empty() ? 0 : static_cast<int>(values.front().size());
    }

    [[nodiscard]] int sample_count() const { return static_cast<int>(times.size()); }

    /// Evaluate at t. Closed forms win; sampled paths interpolate linearly.
    [[nodiscard]] Vector at(double t) const {
        if (closed_form) return closed_form(t);
        if (times.empty()) throw input_error("path has no samples");
        constexpr double tol = 1e-12;
        if (t < times.front() - tol || t > times.back() + tol)
            throw std::domain_error("path evaluated outside its sampled range");
        auto it = std::lower_bound(times.begin(), times.end(), t - tol);
        if (it == times.end()) return values.back();
        auto i = static_cast<std::size_t>(it - times.begin());
        if (std::abs(times[i] - t) <= tol) return values[i];
        if (i == 0) return values.front();
        const double t0 = times[i - 1];
        const double t1 = times[i];
        const double w = (t - t0) / (t1 - t0);
        return (1.0 - w) * values[i - 1] + w * values[i];
    }

    /// Index of the sample at time t, or -1 when no sample matches exactly.
    [[nodiscard]] int index_at(double t, double tol = 1e-12) const {
        auto it = std::lower_bound(times.begin(), times.end(), t - tol);
        if (it == times.end()) return -1;
        auto i = static_cast<std::size_t>(it - times.begin());
        if (std::abs(times[i] - t) <= tol) return static_cast<int>(i);
        return -1;
    }

    /// If the samples sit on consecutive nodes {i/n, ..., n/n} of the uniform
    /// n-interval grid on [0,1], return n. The final sample must be t = 1.
    [[nodiscard]] std::optional<int> uniform_resolution() const {
        if (times.size() < 2) return std::nullopt;
        const double h = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
        if (!(h > 0.0)) return std::nullopt;
        const auto n = static_cast<long long>(std::llround(1.0 / h));
        if (n < 1 || n > (1 << 30)) return std::nullopt;
        if (std::abs(times.back() - 1.0) > 1e-12) return std::nullopt;
        const auto i0 = static_cast<long long>(std::llround(times.front() * static_cast<double>(n)));
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double expect =
                static_cast<double>(i0 + static_cast<long long>(i)) / static_cast<double>(n);
            if (std::abs(times[i] - expect) > 1e-12) return std::nullopt;
        }
        if (i0 + static_cast<long long>(times.size()) - 1 != n) return std::nullopt;
        return static_cast<int>(n);
    }

    /// Keep every other sample, preserving the final one. Requires an even
    /// number of intervals so that t = 1 survives.
    [[nodiscard]] SampledPath coarsened() const {
        if (times.size() < 3 || times.size() % 2 == 0)
            throw input_error("coarsening needs an odd sample count (even interval count)");
        SampledPath p;
        for (std::size_t i = 0; i < times.size(); i += 2) {
            p.times.push_back(times[i]);
            p.values.push_back(values[i]);
        }
        p.closed_form = closed_form;
        return p;
    }

    [[nodiscard]] double sup_norm() const {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, v.norm());
        return m;
    }

  private:
    static void validate(const std::vector<double>& ts, const std::vector<Vector>& vs) {
        if (ts.empty()) throw input_error("path needs at least one sample");
        if (ts.size() != vs.size()) throw input_error("path times and values disagree in length");
        const auto d = vs.front().size();
        if (d < 1) throw input_error("path values must be non-empty vectors");
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (!std::isfinite(ts[i])) throw input_error("path times must be finite");
            if (ts[i] < -1e-12 || ts[i] > 1.0 + 1e-12)
                throw input_error("path times must lie in [0,1]");
            if (i > 0 && !(ts[i] > ts[i - 1]))
                throw input_error("path times must be strictly increasing");
            if (vs[i].size() != d) throw input_error("path values must share one dimension");
            if (!vs[i].allFinite()) throw input_error("path values must be finite");
        }
    }
};

} // namespace evolveq
