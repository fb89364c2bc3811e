#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "evolveq/errors.hpp"
#include "evolveq/grid.hpp"
#include "evolveq/operator_family.hpp"
#include "evolveq/scalar_function.hpp"

namespace evolveq {

using json = nlohmann::json;

// ----------------------------------------------------------------------------
// Family file schema
//
// {
//   "dim": 2,
//   "shift": 0.0,
//   "flags": {"invertible": true, "dissipative": true},
//   "terms": [
//     {"coeff": {"kind": "sine", "params": [1.0, 3.14], "samples": null},
//      "matrix": [[-3.0, 0.0], [0.0, -4.0]]}
//   ]
// }
// ----------------------------------------------------------------------------

struct LoadResult {
    OperatorFamily family;
    std::vector<std::string> warnings;
};

namespace detail {

[[nodiscard]] inline json coeff_to_json(const ScalarFunction& f) {
    json j;
    j["kind"] = ScalarFunction::kind_name(f.kind());
    j["params"] = f.params();
    if (f.kind() == ScalarFunction::Kind::sampled) {
        json rows = json::array();
        for (const auto& [t, v] : f.samples()) rows.push_back(json::array({t, v}));
        j["samples"] = rows;
    } else {
        j["samples"] = nullptr;
    }
    return j;
}

[[nodiscard]] inline ScalarFunction coeff_from_json(const json& j) {
    if (!j.is_object()) throw input_error("coeff must be an object");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw input_error("coeff.kind must be a string");
    const auto kind = ScalarFunction::kind_from_name(j["kind"].get<std::string>());

    std::vector<double> params;
    if (j.contains("params") && !j["params"].is_null()) {
        if (!j["params"].is_array()) throw input_error("coeff.params must be an array");
        for (const auto& p : j["params"]) {
            if (!p.is_number()) throw input_error("coeff.params entries must be numbers");
            params.push_back(p.get<double>());
        }
    }

    using Kind = ScalarFunction::Kind;
    switch (kind) {
        case Kind::constant:
            if (params.size() != 1) throw input_error("constant coeff needs params [c]");
            return ScalarFunction::constant(params[0]);
        case Kind::polynomial:
            return ScalarFunction::polynomial(params);
        case Kind::sine:
            if (params.size() == 2) return ScalarFunction::sine(params[0], params[1]);
            if (params.size() == 3) return ScalarFunction::sine(params[0], params[1], params[2]);
            throw input_error("sine coeff needs params [amplitude, omega] or [amplitude, omega, phase]");
        case Kind::abs_shift:
            if (params.size() != 1) throw input_error("abs_shift coeff needs params [c]");
            return ScalarFunction::abs_shift(params[0]);
        case Kind::step:
            if (params.size() != 1) throw input_error("step coeff needs params [c]");
            return ScalarFunction::step(params[0]);
        case Kind::sampled: {
            if (!j.contains("samples") || !j["samples"].is_array())
                throw input_error("sampled coeff needs a samples array");
            std::vector<std::pair<double, double>> samples;
            for (const auto& row : j["samples"]) {
                if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
                    throw input_error("sampled coeff entries must be [t, value] pairs");
                samples.emplace_back(row[0].get<double>(), row[1].get<double>());
            }
            return ScalarFunction::sampled(std::move(samples));
        }
    }
    throw input_error("unreachable coeff kind");
}

} // namespace detail

[[nodiscard]] inline json family_to_json(const OperatorFamily& family) {
    json j;
    j["dim"] = family.dim;
    j["shift"] = family.shift;
    j["flags"] = {{"invertible", family.invertible}, {"dissipative", family.dissipative}};
    json terms = json::array();
    for (const auto& term : family.terms) {
        json row;
        row["coeff"] = detail::coeff_to_json(term.coeff);
        json matrix = json::array();
        for (int r = 0; r < family.dim; ++r) {
            json line = json::array();
            for (int c = 0; c < family.dim; ++c) line.push_back(term.matrix(r, c));
            matrix.push_back(line);
        }
        row["matrix"] = matrix;
        terms.push_back(row);
    }
    j["terms"] = terms;
    return j;
}

[[nodiscard]] inline OperatorFamily family_from_json(const json& j) {
    if (!j.is_object()) throw input_error("family file must contain a JSON object");
    if (!j.contains("dim") || !j["dim"].is_number_integer())
        throw input_error("family file needs an integer dim field");
    const int dim = j["dim"].get<int>();
    if (dim < 1) throw input_error("dim must be >= 1");

    double shift = 0.0;
    if (j.contains("shift") && !j["shift"].is_null()) {
        if (!j["shift"].is_number()) throw input_error("shift must be a number");
        shift = j["shift"].get<double>();
    }

    bool invertible = false;
    bool dissipative = false;
    if (j.contains("flags")) {
        const auto& flags = j["flags"];
        if (!flags.is_object()) throw input_error("flags must be an object");
        if (flags.contains("invertible")) invertible = flags["invertible"].get<bool>();
        if (flags.contains("dissipative")) dissipative = flags["dissipative"].get<bool>();
    }

    if (!j.contains("terms") || !j["terms"].is_array())
        throw input_error("family file needs a terms array");
    std::vector<OperatorFamily::Term> terms;
    for (const auto& row : j["terms"]) {
        if (!row.is_object() || !row.contains("coeff") || !row.contains("matrix"))
            throw input_error("each term needs coeff and matrix fields");
        ScalarFunction coeff = detail::coeff_from_json(row["coeff"]);
        const auto& mj = row["matrix"];
        if (!mj.is_array() || static_cast<int>(mj.size()) != dim)
            throw input_error("term matrix must have dim rows (shape mismatch)");
        Matrix m(dim, dim);
        for (int r = 0; r < dim; ++r) {
            const auto& line = mj[r];
            if (!line.is_array() || static_cast<int>(line.size()) != dim)
                throw input_error("term matrix must have dim columns (shape mismatch)");
            for (int c = 0; c < dim; ++c) {
                if (!line[c].is_number())
                    throw input_error("matrix entries must be finite numbers");
                m(r, c) = line[c].get<double>();
            }
        }
        if (!m.allFinite()) throw input_error("matrix entries must be finite numbers");
        terms.push_back({std::move(coeff), std::move(m)});
    }

    return OperatorFamily::make(dim, std::move(terms), shift, invertible, dissipative);
}

/// Parse a family file and validate its flags. A declared dissipative flag is
/// probed on a 64-interval grid; a violation downgrades the flag and leaves a
/// warning for the report rather than failing the load.
[[nodiscard]] inline LoadResult load_family(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open family file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw input_error("family file " + path + " is not valid JSON: " + e.what());
    }
    LoadResult result{family_from_json(j), {}};
    if (result.family.dissipative) {
        const double worst = result.family.max_symmetric_eigenvalue(Grid::uniform(65));
        const double tol_psd = 1e-10;
        if (worst > tol_psd) {
            result.family.dissipative = false;
            result.warnings.push_back(
                "dissipative flag downgraded: symmetric part reaches eigenvalue " +
                std::to_string(worst) + " on the probe grid");
        }
    }
    return result;
}

inline void save_family(const OperatorFamily& family, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open output file: " + path);
    out << family_to_json(family).dump(2) << "\n";
}

} // namespace evolveq
