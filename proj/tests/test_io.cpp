#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "parobs/config.hpp"
#include "parobs/csv.hpp"
#include "parobs/sysfile.hpp"

using namespace parobs;
namespace fs = std::filesystem;

namespace {

const char* kBenchSystem =
    "m = 2\n"
    "A = 0, 1, -1, -2\n"
    "B = 0, 1\n"
    "C = 0, 1\n"
    "x0_true = 0, 0\n"
    "xhat0 = 2, 1\n"
    "eigs = -2, -4\n"
    "input = 3 + 0.5*sin(0.75*t)\n";

}  // namespace

TEST_CASE("system file parsing") {
    SUBCASE("benchmark round trip") {
        std::istringstream in(kBenchSystem);
        const SystemSpec spec = parse_system_spec(in);
        CHECK(spec.sys.m() == 2);
        CHECK(spec.sys.A(0, 1) == 1.0);
        CHECK(spec.xhat0(0) == 2.0);
        CHECK(spec.eigs.size() == 2);
        CHECK(spec.input_offset == 3.0);
        CHECK(spec.input_amplitude == 0.5);
        CHECK(spec.input_frequency == 0.75);
        CHECK(spec.sys.input(0.0)(0) == doctest::Approx(3.0));
    }
    SUBCASE("malformed matrix row names the key") {
        std::string text(kBenchSystem);
        text.replace(text.find("A = 0, 1, -1, -2"), 16, "A = 0, 1, oops, -2");
        std::istringstream in(text);
        try {
            parse_system_spec(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("wrong entry count names the key") {
        std::string text(kBenchSystem);
        text.replace(text.find("A = 0, 1, -1, -2"), 16, "A = 0, 1, -1\n#");
        std::istringstream in(text);
        try {
            parse_system_spec(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("'A'") != std::string::npos);
        }
    }
    SUBCASE("unknown keys are rejected by name") {
        std::string text = std::string(kBenchSystem) + "zeta = 3\n";
        std::istringstream in(text);
        try {
            parse_system_spec(in);
            FAIL("expected UnknownKey");
        } catch (const UnknownKey& e) {
            CHECK(e.key == "zeta");
        }
    }
    SUBCASE("input grammar is strict") {
        std::string text(kBenchSystem);
        text.replace(text.find("input = 3 + 0.5*sin(0.75*t)"), 27,
                     "input = 3 * cos(0.75*t)    ");
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_system_spec(in), ParseError);
    }
}

TEST_CASE("experiment configuration") {
    SUBCASE("empty file yields the benchmark defaults") {
        std::istringstream in("");
        const ExperimentConfig cfg = parse_config(in);
        CHECK(cfg.T == 1.0);
        CHECK(cfg.Tol == 1e-8);
        CHECK(cfg.N == 16);
        CHECK(cfg.fine_divisor == 5);  // dt = dT / 2^5
        REQUIRE(cfg.eig_sets.size() == 1);
        CHECK(cfg.eig_sets[0][0] == -2.0);
        CHECK(cfg.eig_sets[0][1] == -4.0);
        CHECK(cfg.experiment == Experiment::exp1_kcurves);
    }
    SUBCASE("three-point budget sweep") {
        std::istringstream in("gamma_tilde = 1e-3, 1, 1e3\n");
        const ExperimentConfig cfg = parse_config(in);
        REQUIRE(cfg.gamma_tilde.size() == 3);
        CHECK(cfg.gamma_tilde[0] == 1e-3);
        CHECK(cfg.gamma_tilde[2] == 1e3);
    }
    SUBCASE("eigenvalue sets separated by semicolons") {
        std::istringstream in("eigs = -2, -4; -0.25, -0.5\n");
        const ExperimentConfig cfg = parse_config(in);
        REQUIRE(cfg.eig_sets.size() == 2);
        CHECK(cfg.eig_sets[1][0] == -0.25);
    }
    SUBCASE("unknown keys are rejected") {
        std::istringstream in("workers = 4\n");
        CHECK_THROWS_AS(parse_config(in), UnknownKey);
    }
}

TEST_CASE("csv writer") {
    const fs::path dir = fs::temp_directory_path() / "parobs_csv_test";
    fs::create_directories(dir);
    const fs::path file = dir / "t.csv";

    auto write_once = [&] {
        CsvWriter w(file, {"a", "b"});
        w.field(1).field(0.1);
        w.end_row();
        w.field(2).field(1.0 / 3.0);
        w.end_row();
    };
    write_once();
    const CsvTable t = read_csv(file);
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1][0] == "2");

    SUBCASE("schema check") {
        CHECK_NOTHROW(check_schema(file, {"a", "b"}));
        CHECK_THROWS_AS(check_schema(file, {"a", "c"}), Error);
    }
    SUBCASE("rewriting is byte identical") {
        std::ifstream f1(file, std::ios::binary);
        std::stringstream s1;
        s1 << f1.rdbuf();
        write_once();
        std::ifstream f2(file, std::ios::binary);
        std::stringstream s2;
        s2 << f2.rdbuf();
        CHECK(s1.str() == s2.str());
    }
    SUBCASE("field count is enforced") {
        CsvWriter w(dir / "bad.csv", {"a", "b"});
        w.field(1);
        CHECK_THROWS_AS(w.end_row(), Error);
    }
}
