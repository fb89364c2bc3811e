#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <string>

#include "evolveq/catalog.hpp"
#include "evolveq/check_config.hpp"
#include "evolveq/regularity.hpp"

using namespace evolveq;

namespace {

const CatalogEntry& entry_of(const std::string& name, int dim) {
    static std::map<std::string, CatalogEntry> cache;
    const std::string key = name + "/" + std::to_string(dim);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, builtin(name, dim)).first;
    return it->second;
}

// Suites are deterministic, so one run per family serves every section.
const ConditionReport& suite_report(const std::string& suite, const std::string& name,
                                    int dim) {
    static std::map<std::string, ConditionReport> cache;
    const std::string key = suite + ":" + name + "/" + std::to_string(dim);
    auto it = cache.find(key);
    if (it == cache.end()) {
        const auto& family = entry_of(name, dim).family;
        ConditionReport rep;
        if (suite == "kato53")
            rep = check_kato53(family);
        else if (suite == "yosida")
            rep = check_yosida(family);
        else
            rep = check_c1(family);
        it = cache.emplace(key, std::move(rep)).first;
    }
    return it->second;
}

double ratio_of_last(const std::vector<ConvergenceEntry>& conv, int back) {
    const std::size_t n = conv.size();
    REQUIRE(n >= static_cast<std::size_t>(back + 1));
    return conv[n - back].sup_error / conv[n - back - 1].sup_error;
}

} // namespace

// ============================================================================
// Config and probe vectors
// ============================================================================

TEST_CASE("check config validates its knobs") {
    CheckConfig cfg;
    REQUIRE_NOTHROW(cfg.validate());

    CheckConfig bad = cfg;
    bad.grid_n = 100; // not 2^m + 1
    REQUIRE_THROWS_AS(bad.validate(), input_error);

    bad = cfg;
    bad.k_ladder = {8, 16, 16, 32};
    REQUIRE_THROWS_AS(bad.validate(), input_error);

    bad = cfg;
    bad.k_ladder = {8, 16, 32, 48}; // last rung must double the previous one
    REQUIRE_THROWS_AS(bad.validate(), input_error);

    bad = cfg;
    bad.tol_abs = 0.0;
    REQUIRE_THROWS_AS(bad.validate(), input_error);
}

TEST_CASE("probe vectors are deterministic unit vectors starting with the basis") {
    CheckConfig cfg;
    const auto probes = cfg.probe_vectors(5);
    REQUIRE(probes.size() == static_cast<std::size_t>(5 + cfg.extra_probes));
    for (int i = 0; i < 5; ++i) {
        REQUIRE(probes[i](i) == 1.0);
        REQUIRE(probes[i].norm() == Catch::Approx(1.0).margin(1e-15));
    }
    for (std::size_t p = 5; p < probes.size(); ++p)
        REQUIRE(probes[p].norm() == Catch::Approx(1.0).margin(1e-12));
    const auto again = cfg.probe_vectors(5);
    for (std::size_t p = 0; p < probes.size(); ++p)
        REQUIRE((probes[p] - again[p]).norm() == 0.0);
}

// ============================================================================
// Derivative scan and modulus primitives
// ============================================================================

TEST_CASE("derivative scan recovers a smooth derivative to extrapolation accuracy") {
    Matrix m(2, 2);
    m << 1.0, 2.0, -1.0, 0.5;
    const auto map = [&](double t) -> Matrix { return std::sin(2.0 * t) * m; };
    const auto scan =
        detail::scan_derivative(map, Grid::uniform(65), 1.0 / 1024.0, 1e-5);
    REQUIRE(scan.bad_times.empty());
    double worst = 0.0;
    for (std::size_t i = 0; i < scan.times.size(); ++i) {
        const Matrix exact = 2.0 * std::cos(2.0 * scan.times[i]) * m;
        worst = std::max(worst, (scan.values[i] - exact).norm());
    }
    REQUIRE(worst < 1e-8); // includes the one-sided boundary stencils
    REQUIRE(scan.sup_norm == Catch::Approx(2.0 * spectral_norm(m)).epsilon(1e-6));
}

TEST_CASE("modulus decision separates continuous paths from jumps") {
    Matrix m = Matrix::Identity(2, 2);
    std::vector<double> times;
    std::vector<Matrix> smooth, jumpy;
    const int n = 257;
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        times.push_back(t);
        smooth.push_back(t * t * m);
        jumpy.push_back((t < 0.5 ? -1.0 : 1.0) * m);
    }
    const auto ok = detail::modulus_of_path("smooth", times, smooth, 4, 1e-5);
    REQUIRE(ok.verdict == Verdict::pass);
    const auto bad = detail::modulus_of_path("jump", times, jumpy, 4, 1e-5);
    REQUIRE(bad.verdict == Verdict::fail);
    REQUIRE(std::abs(bad.table.worst_location - 0.5) <= 1.0 / 128.0);
    REQUIRE(bad.table.extrapolated ==
            Catch::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

// ============================================================================
// Scalar affine family: closed-form oracles
// ============================================================================

TEST_CASE("scalar affine family passes all three suites with exact bounds") {
    const auto& kato = suite_report("kato53", "scalar_affine", 1);
    REQUIRE(kato.verdict == Verdict::pass);
    // B(t,s) = (2+t)/(2+s); the sup 1.5 sits at (t,s) = (1,0).
    REQUIRE(kato.bounds.at("sup_B") == Catch::Approx(1.5).epsilon(1e-12));
    REQUIRE(kato.bounds.at("sup_B_t") == 1.0);
    REQUIRE(kato.bounds.at("sup_B_s") == 0.0);
    // B(t,0) = (2+t)/2 climbs monotonically by exactly 1/2.
    REQUIRE(kato.bounds.at("variation_N") == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(kato.bounds.at("sup_dB") == Catch::Approx(0.5).margin(1e-9));

    const auto& yosida = suite_report("yosida", "scalar_affine", 1);
    REQUIRE(yosida.verdict == Verdict::pass);
    // Q(t,s) = 1/(1+s), maximal along s = 0 where it equals 1 exactly.
    REQUIRE(yosida.bounds.at("quotient_M") == Catch::Approx(1.0).margin(1e-3));
    REQUIRE(yosida.bounds.at("quotient_M_s") == 0.0);
    REQUIRE(yosida.fitted_rate > 0.8);

    const auto& c1 = suite_report("c1", "scalar_affine", 1);
    REQUIRE(c1.verdict == Verdict::pass);
    REQUIRE(c1.bounds.at("sup_dA") == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(c1.bounds.at("oracle_residual") < 1e-9);
}

TEST_CASE("scalar affine quotient limit matches 1/(1+t) uniformly") {
    const auto& family = entry_of("scalar_affine", 1).family;
    const CheckConfig cfg;
    const auto series = quotient_series(family, cfg);
    const int k_max = cfg.k_ladder.back();
    double worst = 0.0;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double exact = 1.0 / (1.0 + series.times[i]);
        worst = std::max(worst, std::abs(series.limit[i](0, 0) - exact));
    }
    REQUIRE(worst <= 5.0 / k_max);
    // Right endpoint: the limit of k C(1, 1 - 1/k) is 1/2.
    REQUIRE(series.limit.back()(0, 0) == Catch::Approx(0.5).margin(1e-3));
    // Raw boundary quotient at t = 1/k_max is 1/(1 + 0) up to O(1/k).
    REQUIRE(series.boundary_quotient(0, 0) == Catch::Approx(1.0).margin(2e-3));
    // Scored errors decay like 1/k.
    REQUIRE(series.errors.back().sup_error < 10.0 / series.errors.back().k);
}

// ============================================================================
// Constant family: everything is exact
// ============================================================================

TEST_CASE("constant family passes with zero variation and roundoff quotients") {
    const auto& kato = suite_report("kato53", "constant", 2);
    REQUIRE(kato.verdict == Verdict::pass);
    REQUIRE(kato.bounds.at("variation_N") <= 1e-12);
    REQUIRE(kato.bounds.at("sup_dB") <= 1e-9);

    const auto& yosida = suite_report("yosida", "constant", 2);
    REQUIRE(yosida.verdict == Verdict::pass);
    REQUIRE(yosida.bounds.at("quotient_M") <= 1e-9);
    REQUIRE(yosida.convergence.back().sup_error <= 1e-9);

    const auto& c1 = suite_report("c1", "constant", 2);
    REQUIRE(c1.verdict == Verdict::pass);
    REQUIRE(c1.bounds.at("sup_dA") <= 1e-9);
}

// ============================================================================
// Smooth sine family: the generic positive case
// ============================================================================

TEST_CASE("smooth sine family passes all three suites") {
    const auto& kato = suite_report("kato53", "smooth_sin", 8);
    const auto& yosida = suite_report("yosida", "smooth_sin", 8);
    const auto& c1 = suite_report("c1", "smooth_sin", 8);
    REQUIRE(kato.verdict == Verdict::pass);
    REQUIRE(yosida.verdict == Verdict::pass);
    REQUIRE(c1.verdict == Verdict::pass);
    REQUIRE(yosida.fitted_rate >= 0.8);
    // The scan agrees with the closed-form derivative far inside 1e-8.
    REQUIRE(c1.bounds.at("oracle_residual") < 1e-8);
    // All parts individually clean.
    for (const auto& [part, verdict] : kato.parts) REQUIRE(verdict == "pass");
    for (const auto& [part, verdict] : yosida.parts) REQUIRE(verdict == "pass");
    for (const auto& [part, verdict] : c1.parts) REQUIRE(verdict == "pass");
}

// ============================================================================
// Lipschitz kink: fails, and fails where it should
// ============================================================================

TEST_CASE("kink family fails the quotient suite by stagnation") {
    const auto& yosida = suite_report("yosida", "lipschitz_kink", 8);
    REQUIRE(yosida.verdict == Verdict::fail);
    REQUIRE(yosida.parts.at("ii") == "fail");
    // The sup errors stop decaying: both ratios over the last three scored
    // rungs stay above 0.9.
    REQUIRE(ratio_of_last(yosida.convergence, 1) >= 0.9);
    REQUIRE(ratio_of_last(yosida.convergence, 2) >= 0.9);
    REQUIRE(yosida.fitted_rate < 0.8);
}

TEST_CASE("kink family fails differentiability with a locus at the kink") {
    const auto& c1 = suite_report("c1", "lipschitz_kink", 8);
    REQUIRE(c1.verdict == Verdict::fail);
    // The stencil scan is blind at a kink that sits exactly on a sample
    // (symmetric cancellation); the modulus prong convicts instead.
    REQUIRE(c1.parts.at("derivative") == "pass");
    REQUIRE(c1.parts.at("modulus") == "fail");
    REQUIRE(c1.failure_loci.size() >= 1);
    bool near_half = false;
    for (double t : c1.failure_loci)
        if (std::abs(t - 0.5) <= 1.0 / 128.0) near_half = true;
    REQUIRE(near_half);

    const auto& kato = suite_report("kato53", "lipschitz_kink", 8);
    REQUIRE(kato.verdict == Verdict::fail);
    REQUIRE(kato.parts.at("ii") == "pass"); // Lipschitz => bounded variation
    REQUIRE(kato.parts.at("iii") == "fail");
}

// ============================================================================
// Step family: jump in A itself
// ============================================================================

TEST_CASE("step family fails differentiability while variation stabilizes") {
    const auto& kato = suite_report("kato53", "step", 8);
    REQUIRE(kato.verdict == Verdict::fail);
    REQUIRE(kato.parts.at("ii") == "pass"); // one jump has bounded variation
    REQUIRE(kato.parts.at("iii") == "fail");
    bool at_half = false;
    for (double t : kato.failure_loci)
        if (std::abs(t - 0.5) <= 1.0 / 128.0) at_half = true;
    REQUIRE(at_half);
    // The jump makes the stencil spread blow up like 1/h at the locus.
    REQUIRE(kato.bounds.at("scan_error_max") > 1.0);

    const auto& c1 = suite_report("c1", "step", 8);
    REQUIRE(c1.verdict == Verdict::fail);
    REQUIRE(c1.parts.at("derivative") == "fail");

    const auto& yosida = suite_report("yosida", "step", 8);
    REQUIRE(yosida.verdict == Verdict::fail);
    REQUIRE(yosida.parts.at("ii") == "fail");
}

// ============================================================================
// Discrete Laplacian: stiff but regular
// ============================================================================

TEST_CASE("discrete laplacian family passes all three suites") {
    REQUIRE(suite_report("kato53", "discrete_laplacian", 8).verdict == Verdict::pass);
    REQUIRE(suite_report("yosida", "discrete_laplacian", 8).verdict == Verdict::pass);
    REQUIRE(suite_report("c1", "discrete_laplacian", 8).verdict == Verdict::pass);
}

// ============================================================================
// Equivalence across the catalog
// ============================================================================

TEST_CASE("the three suites agree with each other and the truth table") {
    const std::map<std::string, int> names = {
        {"constant", 2},        {"scalar_affine", 1}, {"smooth_sin", 8},
        {"lipschitz_kink", 8},  {"step", 8},          {"discrete_laplacian", 8}};
    for (const auto& [name, dim] : names) {
        INFO("family " << name);
        const auto& entry = entry_of(name, dim);
        EquivalenceReport eq;
        eq.kato53 = suite_report("kato53", name, dim);
        eq.yosida = suite_report("yosida", name, dim);
        eq.c1 = suite_report("c1", name, dim);
        REQUIRE(eq.kato53.verdict != Verdict::inconclusive);
        REQUIRE(eq.yosida.verdict != Verdict::inconclusive);
        REQUIRE(eq.c1.verdict != Verdict::inconclusive);
        REQUIRE(eq.kato53.verdict == eq.yosida.verdict);
        REQUIRE(eq.yosida.verdict == eq.c1.verdict);
        const bool pass = eq.kato53.verdict == Verdict::pass;
        REQUIRE(pass == entry.truth.kato53);
    }
}

TEST_CASE("equivalence harness assembles agreement and truth match") {
    const auto eq = equivalence_matrix(entry_of("scalar_affine", 1));
    REQUIRE(eq.agreement == "agree");
    REQUIRE(eq.truth_match.has_value());
    REQUIRE(*eq.truth_match);

    const auto bad = equivalence_matrix(entry_of("step", 8));
    REQUIRE(bad.agreement == "agree");
    REQUIRE(*bad.truth_match); // all-fail is what the truth table expects
}

// ============================================================================
// Refinement does not flip verdicts
// ============================================================================

TEST_CASE("doubling the grid and the ladder preserves verdicts") {
    CheckConfig fine;
    fine.grid_n = 257;
    fine.k_ladder = {8, 16, 32, 64, 128, 256, 512, 1024, 2048};
    fine.validate();

    const auto smooth = check_c1(entry_of("smooth_sin", 8).family, fine);
    REQUIRE(smooth.verdict == Verdict::pass);
    const auto smooth_y = check_yosida(entry_of("smooth_sin", 8).family, fine);
    REQUIRE(smooth_y.verdict == Verdict::pass);

    const auto kink = check_c1(entry_of("lipschitz_kink", 8).family, fine);
    REQUIRE(kink.verdict == Verdict::fail);
    const auto kink_y = check_yosida(entry_of("lipschitz_kink", 8).family, fine);
    REQUIRE(kink_y.verdict == Verdict::fail);
    REQUIRE(kink_y.parts.at("ii") == "fail");
}

// ============================================================================
// Boundary-limit variant of the quotient suite
// ============================================================================

TEST_CASE("boundary variant holds for regular families and not for the kink") {
    REQUIRE(yosida_modified_flag(entry_of("scalar_affine", 1).family));
    REQUIRE(yosida_modified_flag(entry_of("constant", 2).family));
    REQUIRE_FALSE(yosida_modified_flag(entry_of("lipschitz_kink", 8).family));
}

// ============================================================================
// Algebraic diagnostics
// ============================================================================

TEST_CASE("B composes through any anchor at roundoff scale") {
    const std::map<std::string, int> names = {
        {"constant", 2},        {"scalar_affine", 1}, {"smooth_sin", 8},
        {"lipschitz_kink", 8},  {"step", 8},          {"discrete_laplacian", 8}};
    for (const auto& [name, dim] : names) {
        INFO("family " << name);
        const auto& family = entry_of(name, dim).family;
        const double scale = family.scale_on(Grid::uniform(129));
        REQUIRE(b_composition_residual(family) <= 1e-10 * std::max(scale, 1.0));
    }
}

TEST_CASE("B increments integrate the derivative to quadrature accuracy") {
    const auto& family = entry_of("smooth_sin", 8).family;
    const double scale = family.scale_on(Grid::uniform(129));
    REQUIRE(b_increment_residual(family) <= 1e-6 * scale);
    // A quadratic-in-t family is integrated exactly by Simpson.
    const auto& lap = entry_of("discrete_laplacian", 8).family;
    const double lap_scale = lap.scale_on(Grid::uniform(129));
    REQUIRE(b_increment_residual(lap) <= 1e-12 * lap_scale);
}

TEST_CASE("increments of A(t)x factor through the multiplicative increment") {
    for (const std::string name : {"scalar_affine", "smooth_sin", "discrete_laplacian"}) {
        INFO("family " << name);
        const int dim = name == "scalar_affine" ? 1 : 8;
        const auto& family = entry_of(name, dim).family;
        const double scale = family.scale_on(Grid::uniform(129));
        REQUIRE(increment_identity_residual(family) <= 1e-9 * std::max(scale, 1.0));
    }
}

TEST_CASE("the quotient field equals the averaged derivative times the resolvent") {
    const auto& family = entry_of("smooth_sin", 8).family;
    const double scale = family.scale_on(Grid::uniform(129));
    REQUIRE(quotient_integral_residual(family) <= 1e-6 * scale);
}

// ============================================================================
// Breakdown and misuse map to the right outcomes
// ============================================================================

TEST_CASE("a resolvent breakdown yields an inconclusive report with the locus") {
    // A(t) = 2t on [0,1]: 1 - A(t) is singular exactly at t = 1/2.
    auto family = OperatorFamily::make(
        1, {{ScalarFunction::polynomial({0.0, 2.0}), Matrix::Identity(1, 1)}}, 0.0, false,
        false);
    const auto report = check_kato53(family);
    REQUIRE(report.verdict == Verdict::inconclusive);
    REQUIRE(report.failure_loci.size() == 1);
    REQUIRE(report.failure_loci[0] == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("the quotient suite refuses non-invertible families") {
    auto family = OperatorFamily::make(
        1, {{ScalarFunction::polynomial({0.0, 2.0}), Matrix::Identity(1, 1)}}, 0.0, false,
        false);
    REQUIRE_THROWS_AS(check_yosida(family), input_error);
    REQUIRE_THROWS_AS(quotient_series(family), input_error);
}
