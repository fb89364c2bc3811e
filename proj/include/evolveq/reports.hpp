#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evolveq/version.hpp"

namespace evolveq {

enum class Verdict { pass, fail, inconclusive };

[[nodiscard]] inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

namespace detail {

/// NaN is not representable in JSON; reports use null instead.
[[nodiscard]] inline nlohmann::json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

} // namespace detail

/// Sampled modulus of continuity of one path or field, plus its decay
/// extrapolation toward delta -> 0. A continuous path extrapolates to ~0;
/// a jump extrapolates to the jump size.
struct ModulusTable {
    std::string name;
    std::vector<double> deltas;
    std::vector<double> omegas;
    double extrapolated = 0.0;
    double worst_location = std::numeric_limits<double>::quiet_NaN();

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["name"] = name;
        j["deltas"] = deltas;
        j["omegas"] = omegas;
        j["extrapolated"] = detail::finite_or_null(extrapolated);
        j["worst_location"] = detail::finite_or_null(worst_location);
        return j;
    }
};

struct ConvergenceEntry {
    int k = 0;
    double sup_error = 0.0;
};

/// Outcome of one condition suite on one family.
struct ConditionReport {
    std::string suite;
    Verdict verdict = Verdict::inconclusive;
    std::map<std::string, double> bounds;
    std::vector<ConvergenceEntry> convergence;
    double fitted_rate = std::numeric_limits<double>::quiet_NaN();
    std::vector<ModulusTable> moduli;
    std::vector<double> failure_loci;
    std::map<std::string, std::string> parts; // per-part verdicts, e.g. "ii" -> "fail"
    std::vector<std::string> notes;
    nlohmann::json tolerances_used;

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema_version"] = schema_version;
        j["suite"] = suite;
        j["verdict"] = to_string(verdict);
        nlohmann::json b = nlohmann::json::object();
        for (const auto& [k, v] : bounds) b[k] = detail::finite_or_null(v);
        j["bounds"] = b;
        nlohmann::json conv = nlohmann::json::array();
        for (const auto& e : convergence)
            conv.push_back({{"k", e.k}, {"sup_error", detail::finite_or_null(e.sup_error)}});
        j["convergence"] = conv;
        j["fitted_rate"] = detail::finite_or_null(fitted_rate);
        nlohmann::json mods = nlohmann::json::array();
        for (const auto& m : moduli) mods.push_back(m.to_json());
        j["moduli"] = mods;
        j["failure_loci"] = failure_loci;
        j["parts"] = parts;
        j["notes"] = notes;
        j["tolerances_used"] = tolerances_used;
        return j;
    }
};

/// Joint outcome of the three suites on one family.
struct EquivalenceReport {
    ConditionReport kato53;
    ConditionReport yosida;
    ConditionReport c1;
    std::string agreement = "inconclusive"; // agree | disagree | inconclusive
    std::optional<bool> truth_match;
    std::vector<std::string> details;

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema_version"] = schema_version;
        j["kato53"] = kato53.to_json();
        j["yosida"] = yosida.to_json();
        j["c1"] = c1.to_json();
        j["agreement"] = agreement;
        j["truth_match"] = truth_match.has_value() ? nlohmann::json(*truth_match)
                                                   : nlohmann::json(nullptr);
        j["details"] = details;
        return j;
    }
};

struct LemmaReport {
    double mve_margin = std::numeric_limits<double>::quiet_NaN();
    std::vector<ConvergenceEntry> uniform_errors;
    double fitted_rate = std::numeric_limits<double>::quiet_NaN();
    double telescope_residual = std::numeric_limits<double>::quiet_NaN();
    double h_constancy = std::numeric_limits<double>::quiet_NaN();
    double h_constancy_coarse = std::numeric_limits<double>::quiet_NaN();
    double fitted_quad_constant = std::numeric_limits<double>::quiet_NaN();
    Verdict verdict = Verdict::inconclusive;
    std::vector<std::string> notes;

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema_version"] = schema_version;
        j["mve_margin"] = detail::finite_or_null(mve_margin);
        nlohmann::json conv = nlohmann::json::array();
        for (const auto& e : uniform_errors)
            conv.push_back({{"k", e.k}, {"sup_error", detail::finite_or_null(e.sup_error)}});
        j["uniform_errors"] = conv;
        j["fitted_rate"] = detail::finite_or_null(fitted_rate);
        j["telescope_residual"] = detail::finite_or_null(telescope_residual);
        j["h_constancy"] = detail::finite_or_null(h_constancy);
        j["h_constancy_coarse"] = detail::finite_or_null(h_constancy_coarse);
        j["fitted_quad_constant"] = detail::finite_or_null(fitted_quad_constant);
        j["verdict"] = to_string(verdict);
        j["notes"] = notes;
        return j;
    }
};

/// Evolution-system checks on a propagator table.
struct AxiomReport {
    double identity_residual = std::numeric_limits<double>::quiet_NaN();
    double cocycle_residual = std::numeric_limits<double>::quiet_NaN();
    double contraction_max = std::numeric_limits<double>::quiet_NaN();
    bool contraction_applicable = false;
    double solution_residual_max = std::numeric_limits<double>::quiet_NaN();
    double solution_tol_max = std::numeric_limits<double>::quiet_NaN();
    double tol_cocycle = 0.0;
    double tol_contraction = 0.0;
    Verdict verdict = Verdict::inconclusive;
    std::vector<std::string> notes;

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema_version"] = schema_version;
        j["identity_residual"] = detail::finite_or_null(identity_residual);
        j["cocycle_residual"] = detail::finite_or_null(cocycle_residual);
        j["contraction_max"] = detail::finite_or_null(contraction_max);
        j["contraction_applicable"] = contraction_applicable;
        j["solution_residual_max"] = detail::finite_or_null(solution_residual_max);
        j["solution_tol_max"] = detail::finite_or_null(solution_tol_max);
        j["tol_cocycle"] = tol_cocycle;
        j["tol_contraction"] = tol_contraction;
        j["verdict"] = to_string(verdict);
        j["notes"] = notes;
        return j;
    }
};

} // namespace evolveq
