// Command-line front end: runs the condition suites, the equivalence
// harness, the propagator, and the reconstruction engine on builtin or
// file-defined operator families, emitting JSON reports (and trajectory
// CSVs) with a fixed exit-code contract:
//   0  pass / agreement (or an expected failure under --expect fail)
//   1  fail / disagreement
//   2  invalid input
//   3  numerical breakdown or inconclusive outcome

#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evolveq/evolveq.hpp"

namespace {

using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitInconclusive = 3;

struct CommonArgs {
    std::string family;
    std::string file;
    int dim = 0; // 0 means use the family's conventional dimension
    int grid_n = 129;
    int k_max = 1024;
    double tol = 1e-6;
    int probes = 8;
    std::uint64_t seed = 42;
    std::string out;
    std::string expect = "pass";
};

void add_family_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--family", args.family, "builtin family name");
    cmd->add_option("--file", args.file, "family definition JSON file");
    cmd->add_option("--dim", args.dim, "dimension for builtin families (default: family specific)")
        ->check(CLI::PositiveNumber);
}

void add_config_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--grid-n", args.grid_n, "grid points (2^m + 1)");
    cmd->add_option("--k-max", args.k_max, "finest quotient ladder rung");
    cmd->add_option("--tol", args.tol, "base tolerance, scaled by sup ||A||");
    cmd->add_option("--probes", args.probes, "extra random probe vectors");
    cmd->add_option("--seed", args.seed, "probe vector seed");
}

[[nodiscard]] evolveq::CheckConfig make_config(const CommonArgs& args) {
    evolveq::CheckConfig cfg;
    cfg.grid_n = args.grid_n;
    cfg.tol_abs = args.tol;
    cfg.extra_probes = args.probes;
    cfg.seed = args.seed;
    cfg.k_ladder.clear();
    for (int k = 8; k < args.k_max; k *= 2) cfg.k_ladder.push_back(k);
    cfg.k_ladder.push_back(args.k_max);
    cfg.validate();
    return cfg;
}

struct FamilySource {
    evolveq::CatalogEntry entry;
    std::string source;
    bool is_builtin = false;
};

[[nodiscard]] FamilySource resolve_family(const CommonArgs& args) {
    if (args.family.empty() == args.file.empty())
        throw evolveq::input_error("provide exactly one of --family or --file");
    FamilySource fs;
    if (!args.family.empty()) {
        const int dim =
            args.dim > 0 ? args.dim : evolveq::builtin_default_dim(args.family);
        fs.entry = evolveq::builtin(args.family, dim);
        fs.source = "builtin:" + args.family;
        fs.is_builtin = true;
    } else {
        auto loaded = evolveq::load_family(args.file);
        for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
        fs.entry = {args.file, std::move(loaded.family), evolveq::TruthTable{}, ""};
        fs.source = "file:" + args.file;
    }
    return fs;
}

[[nodiscard]] std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

[[nodiscard]] json make_manifest(const std::string& command, const FamilySource& fs,
                                 const json& config, const CommonArgs& args) {
    json m;
    m["command"] = command;
    m["family"] = fs.source;
    m["dim"] = fs.entry.family.dim;
    m["config"] = config;
    m["out"] = args.out.empty() ? "-" : args.out;
    m["seed"] = args.seed;
    m["tool_version"] = evolveq::version_string;
    m["timestamp"] = utc_timestamp();
    return m;
}

void emit(const json& doc, const std::string& out) {
    if (out.empty()) {
        std::cout << doc.dump(2) << "\n";
        return;
    }
    std::ofstream f(out);
    if (!f) throw evolveq::input_error("cannot open '" + out + "' for writing");
    f << doc.dump(2) << "\n";
    if (!f) throw evolveq::input_error("failed while writing '" + out + "'");
}

[[nodiscard]] int verdict_exit(evolveq::Verdict v, const std::string& expect) {
    if (v == evolveq::Verdict::inconclusive) return kExitInconclusive;
    const bool passed = v == evolveq::Verdict::pass;
    if (expect == "fail") return passed ? kExitFail : kExitPass;
    return passed ? kExitPass : kExitFail;
}

[[nodiscard]] evolveq::Verdict worst_of(const std::vector<evolveq::Verdict>& vs) {
    bool inconclusive = false;
    for (auto v : vs) {
        if (v == evolveq::Verdict::fail) return evolveq::Verdict::fail;
        if (v == evolveq::Verdict::inconclusive) inconclusive = true;
    }
    return inconclusive ? evolveq::Verdict::inconclusive : evolveq::Verdict::pass;
}

// ----------------------------------------------------------------------------
// check
// ----------------------------------------------------------------------------

int cmd_check(const CommonArgs& args, const std::string& suite) {
    const auto fs = resolve_family(args);
    const auto cfg = make_config(args);
    std::vector<evolveq::Verdict> verdicts;
    json body;
    if (suite == "kato53" || suite == "all") {
        const auto r = evolveq::check_kato53(fs.entry.family, cfg);
        verdicts.push_back(r.verdict);
        if (suite == "all")
            body["kato53"] = r.to_json();
        else
            body = r.to_json();
    }
    if (suite == "yosida" || suite == "all") {
        const auto r = evolveq::check_yosida(fs.entry.family, cfg);
        verdicts.push_back(r.verdict);
        if (suite == "all")
            body["yosida"] = r.to_json();
        else
            body = r.to_json();
    }
    if (suite == "c1" || suite == "all") {
        const auto r = evolveq::check_c1(fs.entry.family, cfg);
        verdicts.push_back(r.verdict);
        if (suite == "all")
            body["c1"] = r.to_json();
        else
            body = r.to_json();
    }
    if (verdicts.empty())
        throw evolveq::input_error("unknown suite '" + suite +
                                   "' (expected kato53, yosida, c1, or all)");
    json doc;
    doc["schema_version"] = evolveq::schema_version;
    doc["manifest"] = make_manifest("check", fs, cfg.to_json(), args);
    doc["manifest"]["suite"] = suite;
    doc["report"] = body;
    emit(doc, args.out);
    return verdict_exit(worst_of(verdicts), args.expect);
}

// ----------------------------------------------------------------------------
// equivalence
// ----------------------------------------------------------------------------

int cmd_equivalence(const CommonArgs& args) {
    const auto fs = resolve_family(args);
    const auto cfg = make_config(args);
    auto eq = evolveq::equivalence_matrix(fs.entry, cfg);
    if (!fs.is_builtin) eq.truth_match.reset(); // no truth table for file families
    json doc;
    doc["schema_version"] = evolveq::schema_version;
    doc["manifest"] = make_manifest("equivalence", fs, cfg.to_json(), args);
    doc["report"] = eq.to_json();
    emit(doc, args.out);
    if (eq.agreement == "inconclusive") return kExitInconclusive;
    if (eq.agreement != "agree") return kExitFail;
    if (eq.truth_match.has_value() && !*eq.truth_match) return kExitFail;
    return kExitPass;
}

// ----------------------------------------------------------------------------
// propagate
// ----------------------------------------------------------------------------

[[nodiscard]] evolveq::Vector parse_state(const std::string& csv, int dim) {
    if (csv.empty()) return evolveq::Vector::Ones(dim);
    std::vector<double> parts;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            parts.push_back(v);
        } catch (const std::exception&) {
            throw evolveq::input_error("cannot parse '" + token + "' in --y");
        }
    }
    if (static_cast<int>(parts.size()) != dim)
        throw evolveq::input_error("--y has " + std::to_string(parts.size()) +
                                   " entries but the family has dimension " +
                                   std::to_string(dim));
    evolveq::Vector y(dim);
    for (int i = 0; i < dim; ++i) y(i) = parts[static_cast<std::size_t>(i)];
    return y;
}

int cmd_propagate(const CommonArgs& args, double s, const std::string& y_csv,
                  const std::string& method_name, int n_sub,
                  const std::string& out_csv) {
    const auto fs = resolve_family(args);
    const auto& family = fs.entry.family;
    const evolveq::Grid grid = evolveq::Grid::uniform(args.grid_n);
    const evolveq::Vector y = parse_state(y_csv, family.dim);

    evolveq::PropagatorOptions opts;
    opts.method = evolveq::step_method_from_name(method_name);
    opts.n_sub = n_sub;
    const auto propagator = evolveq::Propagator::build(family, grid, opts);
    const auto axioms = propagator.verify_axioms(family);

    const auto traj = evolveq::solve_ivp(family, s, y, grid);
    const auto residuals = evolveq::pointwise_residuals(family, traj);
    evolveq::write_trajectory_csv(out_csv, traj, residuals);

    json body;
    body["axioms"] = axioms.to_json();
    body["trajectory_csv"] = out_csv;
    body["initial_time"] = s;
    body["final_time"] = traj.times.back();
    json final_state = json::array();
    for (int c = 0; c < family.dim; ++c) final_state.push_back(traj.states.back()(c));
    body["final_state"] = final_state;

    json doc;
    doc["schema_version"] = evolveq::schema_version;
    doc["manifest"] = make_manifest("propagate", fs, json::object(), args);
    doc["manifest"]["s"] = s;
    doc["manifest"]["method"] = method_name;
    doc["manifest"]["n_sub"] = n_sub;
    doc["manifest"]["grid_n"] = args.grid_n;
    doc["report"] = body;
    emit(doc, args.out);
    return verdict_exit(axioms.verdict, args.expect);
}

// ----------------------------------------------------------------------------
// lemma
// ----------------------------------------------------------------------------

[[nodiscard]] evolveq::SampledPath lemma_path(const std::string& name, int k_max,
                                              const evolveq::CheckConfig& cfg) {
    const auto times = evolveq::Grid::uniform(k_max + 1).points;
    const auto scalar = [&](const std::function<double(double)>& f) {
        return evolveq::SampledPath::from_function(
            [f](double t) {
                evolveq::Vector v(1);
                v(0) = f(t);
                return v;
            },
            times);
    };
    if (name == "square") return scalar([](double t) { return t * t; });
    if (name == "linear") return scalar([](double t) { return 0.25 + 0.5 * t; });
    if (name == "constant") return scalar([](double) { return 1.0; });
    if (name == "kink") return scalar([](double t) { return std::abs(t - 0.5); });
    if (name.rfind("family:", 0) == 0) {
        const auto rest = name.substr(7);
        const auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw evolveq::input_error("expected family:<name>:<probe-index>");
        const std::string fam_name = rest.substr(0, colon);
        int index = 0;
        try {
            index = std::stoi(rest.substr(colon + 1));
        } catch (const std::exception&) {
            throw evolveq::input_error("bad probe index in '" + name + "'");
        }
        const auto entry = evolveq::builtin(fam_name, 8);
        const auto probes = cfg.probe_vectors(entry.family.dim);
        if (index < 0 || static_cast<std::size_t>(index) >= probes.size())
            throw evolveq::input_error("probe index out of range (have " +
                                       std::to_string(probes.size()) + ")");
        const auto family = entry.family;
        const auto x = probes[static_cast<std::size_t>(index)];
        return evolveq::SampledPath::from_function(
            [family, x](double t) -> evolveq::Vector { return family.eval(t) * x; },
            times);
    }
    throw evolveq::input_error(
        "unknown path '" + name +
        "' (expected square, linear, constant, kink, or family:<name>:<index>)");
}

int cmd_lemma(const CommonArgs& args, const std::string& path_name) {
    evolveq::CheckConfig cfg;
    cfg.extra_probes = args.probes;
    cfg.seed = args.seed;
    std::vector<int> ladder;
    for (int k = 8; k < args.k_max; k *= 2) ladder.push_back(k);
    ladder.push_back(args.k_max);

    const auto path = lemma_path(path_name, args.k_max, cfg);
    const auto report = evolveq::reconstruct_and_verify(path, ladder);

    json doc;
    doc["schema_version"] = evolveq::schema_version;
    json manifest;
    manifest["command"] = "lemma";
    manifest["path"] = path_name;
    manifest["k_ladder"] = ladder;
    manifest["out"] = args.out.empty() ? "-" : args.out;
    manifest["seed"] = args.seed;
    manifest["tool_version"] = evolveq::version_string;
    manifest["timestamp"] = utc_timestamp();
    doc["manifest"] = manifest;
    doc["report"] = report.to_json();
    emit(doc, args.out);
    return verdict_exit(report.verdict, args.expect);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"evolveq: executable regularity conditions, evolution systems, and "
                 "reconstruction checks for time-dependent operator families on [0,1]. "
                 "Set EVOLVEQ_THREADS to cap worker threads."};
    app.require_subcommand(1);

    CommonArgs check_args;
    std::string suite = "all";
    auto* check = app.add_subcommand("check", "run a condition suite on a family");
    add_family_flags(check, check_args);
    add_config_flags(check, check_args);
    check->add_option("--suite", suite, "kato53 | yosida | c1 | all");
    check->add_option("--out", check_args.out, "report path (default stdout)");
    check->add_option("--expect", check_args.expect, "pass | fail")
        ->check(CLI::IsMember({"pass", "fail"}));

    CommonArgs eq_args;
    auto* equivalence =
        app.add_subcommand("equivalence", "run all three suites and compare verdicts");
    add_family_flags(equivalence, eq_args);
    add_config_flags(equivalence, eq_args);
    equivalence->add_option("--out", eq_args.out, "report path (default stdout)");

    CommonArgs prop_args;
    prop_args.grid_n = 33;
    double prop_s = 0.0;
    std::string prop_y;
    std::string prop_method = "frozen";
    int prop_n_sub = 16;
    std::string prop_csv = "trajectory.csv";
    auto* propagate =
        app.add_subcommand("propagate", "build U(t,s), verify it, march a trajectory");
    add_family_flags(propagate, prop_args);
    propagate->add_option("--grid-n", prop_args.grid_n, "grid points for the table");
    propagate->add_option("--s", prop_s, "initial time (must be a grid point)");
    propagate->add_option("--y", prop_y, "initial state, comma separated (default ones)");
    propagate->add_option("--method", prop_method, "frozen | rk4");
    propagate->add_option("--n-sub", prop_n_sub, "substeps per grid interval")
        ->check(CLI::PositiveNumber);
    propagate->add_option("--out", prop_args.out, "axiom report path (default stdout)");
    propagate->add_option("--out-csv", prop_csv, "trajectory CSV path");
    propagate->add_option("--expect", prop_args.expect, "pass | fail")
        ->check(CLI::IsMember({"pass", "fail"}));

    CommonArgs lemma_args;
    std::string lemma_path_name;
    auto* lemma = app.add_subcommand("lemma", "reconstruct a path from its quotients");
    lemma->add_option("--path", lemma_path_name,
                      "square | linear | constant | kink | family:<name>:<index>")
        ->required();
    lemma->add_option("--k-max", lemma_args.k_max, "finest quotient ladder rung");
    lemma->add_option("--probes", lemma_args.probes, "extra random probe vectors");
    lemma->add_option("--seed", lemma_args.seed, "probe vector seed");
    lemma->add_option("--out", lemma_args.out, "report path (default stdout)");
    lemma->add_option("--expect", lemma_args.expect, "pass | fail")
        ->check(CLI::IsMember({"pass", "fail"}));

    int exit_code = kExitInvalid;
    check->callback([&] { exit_code = cmd_check(check_args, suite); });
    equivalence->callback([&] { exit_code = cmd_equivalence(eq_args); });
    propagate->callback([&] {
        exit_code = cmd_propagate(prop_args, prop_s, prop_y, prop_method, prop_n_sub,
                                  prop_csv);
    });
    lemma->callback([&] { exit_code = cmd_lemma(lemma_args, lemma_path_name); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitInvalid;
    } catch (const evolveq::breakdown_error& e) {
        std::cerr << "breakdown: " << e.what() << "\n";
        return kExitInconclusive;
    } catch (const evolveq::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const evolveq::derivative_unavailable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return exit_code;
}
