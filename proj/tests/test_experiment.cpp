#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sns/experiment.hpp"

using namespace sns;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path d = fs::temp_directory_path() / ("sns2d_exp_" + tag);
    fs::remove_all(d);
    return d;
}

RunConfig parse(const std::string& text) {
    const ValidationResult r = validate_config(text);
    REQUIRE(r.ok());
    return r.config;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream is(p);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("constants command writes gamma_sup = 1/6 for the unit setup") {
    const fs::path dir = fresh_dir("constants");
    RunConfig cfg = parse(R"({
        "command": "constants",
        "physics": {"viscosity": 1.0, "horizon": 1.0},
        "analysis": {"k0": 1.0, "k1": 0.0, "l1": 0.0, "c_bar": 1.0, "c_tilde": 1.0}
    })");
    cfg.output_dir = dir.string();
    REQUIRE(run_experiment(cfg) == exit_ok);

    const auto rows = read_csv(dir / "constants.csv");
    bool found_gamma = false, found_alpha = false;
    for (const auto& r : rows) {
        if (r.size() >= 2 && r[0] == "gamma_sup") {
            CHECK(std::stod(r[1]) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
            found_gamma = true;
        }
        if (r.size() >= 2 && r[0] == "alpha0") {
            CHECK(std::stod(r[1]) == doctest::Approx(0.25).epsilon(1e-12));
            found_alpha = true;
        }
    }
    CHECK(found_gamma);
    CHECK(found_alpha);
    CHECK(fs::exists(dir / "manifest.json"));
    fs::remove_all(dir);
}

TEST_CASE("single_run with zero noise and zero data writes an all-zero trajectory") {
    const fs::path dir = fresh_dir("singlezero");
    RunConfig cfg = parse(R"({
        "command": "single_run",
        "grid": {"n_modes": 16},
        "noise": {"amplitude": 0.0},
        "scheme": {"kind": "fully_implicit", "n_steps": 8},
        "initial_condition": {"kind": "zero"}
    })");
    cfg.output_dir = dir.string();
    REQUIRE(run_experiment(cfg) == exit_ok);
    const auto rows = read_csv(dir / "trajectory.csv");
    REQUIRE(rows.size() == 10);  // header + 9 states
    for (size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][2]) == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("identical configs produce byte-identical CSVs") {
    const fs::path d1 = fresh_dir("rep1");
    const fs::path d2 = fresh_dir("rep2");
    const std::string text = R"({
        "command": "single_run",
        "grid": {"n_modes": 16},
        "physics": {"viscosity": 1.0, "horizon": 0.25},
        "noise": {"amplitude": 0.5},
        "scheme": {"kind": "semi_implicit", "n_steps": 8},
        "initial_condition": {"kind": "taylor_green", "amplitude": 1.0},
        "study": {"base_seed": 99, "ladder": [8], "reference_n": 64}
    })";
    RunConfig c1 = parse(text);
    c1.output_dir = d1.string();
    RunConfig c2 = parse(text);
    c2.output_dir = d2.string();
    REQUIRE(run_experiment(c1) == exit_ok);
    REQUIRE(run_experiment(c2) == exit_ok);
    CHECK(slurp(d1 / "trajectory.csv") == slurp(d2 / "trajectory.csv"));
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("convergence command emits errors, rates, moments and a plot script") {
    const fs::path dir = fresh_dir("conv");
    RunConfig cfg = parse(R"({
        "command": "convergence",
        "grid": {"n_modes": 16},
        "physics": {"viscosity": 1.0, "horizon": 0.25},
        "noise": {"amplitude": 0.5, "exponent": 3.0},
        "initial_condition": {"kind": "taylor_green"},
        "study": {"ladder": [2, 4, 8], "reference_n": 64, "mc_samples": 3, "base_seed": 5}
    })");
    cfg.output_dir = dir.string();
    REQUIRE(run_experiment(cfg) == exit_ok);
    for (const char* name : {"errors.csv", "rates.csv", "moments.csv", "plot.gnuplot",
                             "manifest.json"})
        CHECK(fs::exists(dir / name));

    const auto errors = read_csv(dir / "errors.csv");
    REQUIRE(errors.size() == 4);
    CHECK(errors[0][0] == "scheme");
    for (size_t i = 1; i < errors.size(); ++i) CHECK(std::stod(errors[i][4]) > 0.0);

    // every manifest-listed output exists and the checksums are well-formed
    const std::string manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("errors.csv") != std::string::npos);
    CHECK(manifest.find("fnv1a64") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("solver failure exits with code 3 and a machine-readable record") {
    const fs::path dir = fresh_dir("fail");
    RunConfig cfg = parse(R"({
        "command": "single_run",
        "grid": {"n_modes": 16},
        "physics": {"viscosity": 0.001, "horizon": 8.0},
        "noise": {"amplitude": 0.0},
        "scheme": {"kind": "fully_implicit", "n_steps": 1, "solver_max_iter": 25},
        "initial_condition": {"kind": "random_smooth", "amplitude": 80.0, "decay": 1.0}
    })");
    cfg.output_dir = dir.string();
    CHECK(run_experiment(cfg) == exit_solver_failure);
    CHECK(fs::exists(dir / "failed" / "error.json"));
    const std::string err = slurp(dir / "failed" / "error.json");
    CHECK(err.find("solver_failure") != std::string::npos);
    CHECK(!fs::exists(dir / "trajectory.csv"));  // partial outputs relocated
    fs::remove_all(dir);
}

TEST_CASE("experiments write only below the output directory") {
    const fs::path parent = fresh_dir("confine");
    fs::create_directories(parent);
    const fs::path dir = parent / "out";
    RunConfig cfg = parse(R"({
        "command": "constants"
    })");
    cfg.output_dir = dir.string();
    REQUIRE(run_experiment(cfg) == exit_ok);
    size_t outside = 0;
    for (const auto& e : fs::recursive_directory_iterator(parent))
        if (e.path().string().find(dir.string()) != 0) ++outside;
    CHECK(outside == 0);
    fs::remove_all(parent);
}
