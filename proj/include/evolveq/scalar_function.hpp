#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "evolveq/errors.hpp"

namespace evolveq {

/// Scalar coefficient t -> phi(t) on [0,1]. The closed-form kinds carry an
/// exact derivative; abs_shift, step and sampled do not, and families built
/// from them report derivative_available() == false.
class ScalarFunction {
public:
    enum class Kind { constant, polynomial, sine, abs_shift, step, sampled };

    [[nodiscard]] static ScalarFunction constant(double c) {
        return ScalarFunction(Kind::constant, {c}, {});
    }

    /// coeffs[i] multiplies t^i.
    [[nodiscard]] static ScalarFunction polynomial(std::vector<double> coeffs) {
        if (coeffs.empty()) throw input_error("polynomial needs coefficients");
        return ScalarFunction(Kind::polynomial, std::move(coeffs), {});
    }

    /// amplitude * sin(omega * t + phase)
    [[nodiscard]] static ScalarFunction sine(double amplitude, double omega, double phase = 0.0) {
        return ScalarFunction(Kind::sine, {amplitude, omega, phase}, {});
    }

    /// |t - c|
    [[nodiscard]] static ScalarFunction abs_shift(double c) {
        return ScalarFunction(Kind::abs_shift, {c}, {});
    }

    /// 0 for t < c, 1 for t >= c
    [[nodiscard]] static ScalarFunction step(double c) {
        return ScalarFunction(Kind::step, {c}, {});
    }

    /// Piecewise-linear interpolant of (t, value) samples.
    [[nodiscard]] static ScalarFunction sampled(std::vector<std::pair<double, double>> samples) {
        if (samples.size() < 2) throw input_error("sampled coefficient needs at least two samples");
        std::sort(samples.begin(), samples.end());
        for (std::size_t i = 0; i + 1 < samples.size(); ++i)
            if (!(samples[i].first < samples[i + 1].first))
                throw input_error("sampled coefficient times must be strictly increasing");
        for (const auto& [t, v] : samples)
            if (!std::isfinite(t) || !std::isfinite(v))
                throw input_error("sampled coefficient contains a non-finite entry");
        return ScalarFunction(Kind::sampled, {}, std::move(samples));
    }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] const std::vector<double>& params() const { return params_; }
    [[nodiscard]] const std::vector<std::pair<double, double>>& samples() const { return samples_; }

    [[nodiscard]] bool has_derivative() const {
        return kind_ == Kind::constant || kind_ == Kind::polynomial || kind_ == Kind::sine;
    }

    [[nodiscard]] double value(double t) const {
        switch (kind_) {
            case Kind::constant: return params_[0];
            case Kind::polynomial: {
                double acc = 0.0;
                for (std::size_t i = params_.size(); i-- > 0;) acc = acc * t + params_[i];
                return acc;
            }
            case Kind::sine: return params_[0] * std::sin(params_[1] * t + params_[2]);
            case Kind::abs_shift: return std::abs(t - params_[0]);
            case Kind::step: return t >= params_[0] ? 1.0 : 0.0;
            case Kind::sampled: return interpolate(t);
        }
        throw input_error("unreachable coefficient kind");
    }

    [[nodiscard]] double derivative_value(double t) const {
        switch (kind_) {
            case Kind::constant: return 0.0;
            case Kind::polynomial: {
                double acc = 0.0;
                for (std::size_t i = params_.size(); i-- > 1;)
                    acc = acc * t + static_cast<double>(i) * params_[i];
                return acc;
            }
            case Kind::sine: return params_[0] * params_[1] * std::cos(params_[1] * t + params_[2]);
            default:
                throw derivative_unavailable("coefficient kind has no closed-form derivative");
        }
    }

    [[nodiscard]] static std::string kind_name(Kind k) {
        switch (k) {
            case Kind::constant: return "constant";
            case Kind::polynomial: return "polynomial";
            case Kind::sine: return "sine";
            case Kind::abs_shift: return "abs_shift";
            case Kind::step: return "step";
            case Kind::sampled: return "sampled";
        }
        return "unknown";
    }

    [[nodiscard]] static Kind kind_from_name(const std::string& name) {
        if (name == "constant") return Kind::constant;
        if (name == "polynomial") return Kind::polynomial;
        if (name == "sine") return Kind::sine;
        if (name == "abs_shift") return Kind::abs_shift;
        if (name == "step") return Kind::step;
        if (name == "sampled") return Kind::sampled;
        throw input_error("unknown coefficient kind: " + name);
    }

private:
    ScalarFunction(Kind k, std::vector<double> params,
                   std::vector<std::pair<double, double>> samples)
        : kind_(k), params_(std::move(params)), samples_(std::move(samples)) {
        for (double p : params_)
            if (!std::isfinite(p)) throw input_error("coefficient parameter is not finite");
    }

    [[nodiscard]] double interpolate(double t) const {
        if (t < samples_.front().first || t > samples_.back().first)
            throw std::domain_error("sampled coefficient evaluated outside its sample range");
        auto hi = std::lower_bound(samples_.begin(), samples_.end(), t,
                                   [](const auto& s, double v) { return s.first < v; });
        if (hi->first == t) return hi->second;
        auto lo = hi - 1;
        const double w = (t - lo->first) / (hi->first - lo->first);
        return lo->second + w * (hi->second - lo->second);
    }

    Kind kind_;
    std::vector<double> params_;
    std::vector<std::pair<double, double>> samples_;
};

} // namespace evolveq
