#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "evolveq/catalog.hpp"
#include "evolveq/family_io.hpp"
#include "test_support.hpp"

using namespace evolveq;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / "evolveq_io_test";
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    [[nodiscard]] std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

} // namespace

TEST_CASE("families round-trip through JSON bitwise", "[family-io]") {
    TempDir dir;
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (const auto& name : builtin_names()) {
        auto entry = builtin(name, builtin_default_dim(name));
        const auto path = dir.file(name + ".json");
        save_family(entry.family, path);
        auto loaded = load_family(path);

        INFO(name);
        CHECK(loaded.warnings.empty());
        CHECK(loaded.family.dim == entry.family.dim);
        CHECK(loaded.family.shift == entry.family.shift);
        CHECK(loaded.family.invertible == entry.family.invertible);
        CHECK(loaded.family.dissipative == entry.family.dissipative);

        // evaluation must agree bit for bit at random probe points
        for (int i = 0; i < 1000; ++i) {
            const double t = unit(rng);
            const Matrix a = entry.family.eval(t);
            const Matrix b = loaded.family.eval(t);
            REQUIRE((a - b).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("sampled coefficients serialize with their sample table", "[family-io]") {
    TempDir dir;
    auto coeff = ScalarFunction::sampled({{0.0, 1.0}, {1.0, 2.0}});
    auto family = OperatorFamily::make(
        1, {{coeff, -Matrix::Identity(1, 1)}}, 0.0, true, true);
    const auto path = dir.file("sampled.json");
    save_family(family, path);
    auto loaded = load_family(path);
    CHECK(loaded.family.eval(0.5)(0, 0) == -1.5);
    CHECK(!loaded.family.derivative_available());
}

TEST_CASE("loader rejects malformed files with specific errors", "[family-io]") {
    TempDir dir;

    SECTION("missing file") {
        CHECK_THROWS_AS(load_family(dir.file("missing.json")), input_error);
    }
    SECTION("invalid json") {
        std::ofstream(dir.file("broken.json")) << "{ not json";
        CHECK_THROWS_AS(load_family(dir.file("broken.json")), input_error);
    }
    SECTION("shape mismatch") {
        std::ofstream(dir.file("shape.json")) << R"({
            "dim": 2, "shift": 0.0,
            "flags": {"invertible": true, "dissipative": false},
            "terms": [{"coeff": {"kind": "constant", "params": [1.0], "samples": null},
                       "matrix": [[1,0,0],[0,1,0],[0,0,1]]}]
        })";
        CHECK_THROWS_AS(load_family(dir.file("shape.json")), input_error);
    }
    SECTION("non-finite entries") {
        std::ofstream(dir.file("nan.json")) << R"({
            "dim": 1, "shift": 0.0,
            "flags": {"invertible": true, "dissipative": false},
            "terms": [{"coeff": {"kind": "constant", "params": [1.0], "samples": null},
                       "matrix": [["nan"]]}]
        })";
        CHECK_THROWS_AS(load_family(dir.file("nan.json")), input_error);
    }
    SECTION("unknown kind") {
        std::ofstream(dir.file("kind.json")) << R"({
            "dim": 1, "shift": 0.0,
            "flags": {"invertible": true, "dissipative": false},
            "terms": [{"coeff": {"kind": "mystery", "params": [], "samples": null},
                       "matrix": [[-1.0]]}]
        })";
        CHECK_THROWS_AS(load_family(dir.file("kind.json")), input_error);
    }
}

TEST_CASE("dissipative flag is probed and downgraded with a warning", "[family-io]") {
    TempDir dir;
    // A(t) = +1: flagged dissipative but clearly not
    std::ofstream(dir.file("lying.json")) << R"({
        "dim": 1, "shift": 0.0,
        "flags": {"invertible": true, "dissipative": true},
        "terms": [{"coeff": {"kind": "constant", "params": [1.0], "samples": null},
                   "matrix": [[1.0]]}]
    })";
    auto loaded = load_family(dir.file("lying.json"));
    CHECK(!loaded.family.dissipative);
    REQUIRE(loaded.warnings.size() == 1);
    CHECK(loaded.warnings[0].find("downgraded") != std::string::npos);
}
