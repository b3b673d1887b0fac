#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "tmsim/io.hpp"
#include "tmsim/protocol.hpp"
#include "tmsim/scenario.hpp"

using namespace tmsim;
namespace fs = std::filesystem;

namespace {

const char* k_paper_json = R"({
  "oscillator": {"omega_khz": 125.0, "omega_prime_khz": 37.26},
  "cooling": {"nbar0": 0.06},
  "inhomogeneity": {"target_decay_us": 80.0},
  "seed": 7
})";

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("tmsim_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("config parsing and derived values") {
    const auto cfg = scenario::parse_config(k_paper_json);
    CHECK(cfg.squeeze_r() == doctest::Approx(1.2104).epsilon(1e-4));
    CHECK(cfg.oscillator().dv0() * 1e2 == doctest::Approx(1.7139).epsilon(1e-3));
    CHECK(cfg.sigma_omega() == doctest::Approx(1.0 / (std::sqrt(2.0) * 80e-6)).epsilon(1e-12));
    CHECK(cfg.nbar0 == 0.06);
    CHECK(cfg.seed == 7);

    const std::string report = scenario::validate_report(cfg);
    CHECK(report.find("r=1.210") != std::string::npos);
    CHECK(report.find("dv0_cm_s=1.71") != std::string::npos);
    CHECK(report.find("envelope_decay_us=80") != std::string::npos);
}

TEST_CASE("config validation errors") {
    CHECK_THROWS_AS(scenario::parse_config("{ not json"), ConfigError);
    CHECK_THROWS_AS(scenario::parse_config(R"({"oscillator": {"omega_khz": 125.0}})"),
                    ConfigError); // neither r nor omega_prime
    CHECK_THROWS_AS(scenario::parse_config(R"({
        "oscillator": {"omega_khz": 125.0, "omega_prime_khz": 40.0},
        "protocol": {"r": 0.9}})"),
                    ConfigError); // both
    CHECK_THROWS_AS(scenario::parse_config(R"({
        "oscillator": {"omega_khz": 125.0, "omega_prime_khz": 40.0},
        "cooling": {"nbar0": -0.1}})"),
                    ConfigError);
    CHECK_THROWS_AS(scenario::parse_config(R"({
        "oscillator": {"omega_khz": 125.0, "omega_prime_khz": 40.0},
        "inhomogeneity": {"sigma_omega_krad_s": 8.8, "target_decay_us": 80.0}})"),
                    ConfigError);
    CHECK_THROWS_AS(scenario::parse_config(R"({
        "oscillator": {"omega_khz": 125.0, "omega_prime_khz": 40.0},
        "mystery": {}})"),
                    ConfigError);
    CHECK_THROWS_AS(scenario::parse_config(R"({
        "oscillator": {"omega_khz": "fast", "omega_prime_khz": 40.0}})"),
                    ConfigError);

    // key-anchored message
    try {
        scenario::parse_config(R"({
            "oscillator": {"omega_khz": 125.0, "omega_prime_khz": 40.0},
            "cooling": {"nbar0": -0.1}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("nbar0") != std::string::npos);
    }
}

TEST_CASE("overrides") {
    const auto cfg = scenario::parse_config(
        R"({"oscillator": {"omega_khz": 125.0, "omega_prime_khz": 37.26}})",
        {"cooling.nbar0=0.5", "seed=99"});
    CHECK(cfg.nbar0 == 0.5);
    CHECK(cfg.seed == 99);
    CHECK_THROWS_AS(scenario::parse_config(k_paper_json, {"oops"}), ConfigError);
    CHECK_THROWS_AS(scenario::parse_config(k_paper_json, {"cooling.nbar0=-1"}), ConfigError);
}

TEST_CASE("config hash tracks semantics only") {
    const auto a = scenario::parse_config(k_paper_json);
    // whitespace / key order variations
    const auto b = scenario::parse_config(R"({
        "seed": 7,
        "inhomogeneity": {"target_decay_us": 80.0},
        "cooling":    {"nbar0": 0.06},
        "oscillator": {"omega_prime_khz": 37.26, "omega_khz": 125.0}
    })");
    CHECK(a.hash() == b.hash());
    // explicitly writing a default does not change the hash
    const auto c = scenario::parse_config(R"({
        "oscillator": {"omega_khz": 125.0, "omega_prime_khz": 37.26},
        "cooling": {"nbar0": 0.06},
        "inhomogeneity": {"target_decay_us": 80.0},
        "velocimetry": {"points": 41},
        "seed": 7
    })");
    CHECK(a.hash() == c.hash());
    // a semantic change does
    const auto d = scenario::parse_config(k_paper_json, {"cooling.nbar0=0.07"});
    CHECK(a.hash() != d.hash());
    // output location is not semantic
    const auto e = scenario::parse_config(k_paper_json, {"output.directory=elsewhere"});
    CHECK(a.hash() == e.hash());
}

TEST_CASE("criteria artifact") {
    const auto dir = fresh_dir("criteria");
    const auto cfg = scenario::parse_config(R"({
        "oscillator": {"omega_khz": 125.0},
        "protocol": {"r": 0.88, "relative_phase_rad": 1.5707963267948966},
        "cooling": {"nbar0": 0.06},
        "seed": 7
    })");
    CHECK(cfg.r.has_value());
    const std::string summary = scenario::run_scenario("criteria", cfg, dir);
    CHECK(summary.find("steering: yes") != std::string::npos);

    const auto j = nlohmann::json::parse(slurp(dir / "criteria.json"));
    CHECK(j["epr"]["product"].get<double>() ==
          doctest::Approx(1.12 * std::exp(-1.76) / 2.0).epsilon(1e-10));
    CHECK(j["epr"]["product"].get<double>() == doctest::Approx(0.09634).epsilon(1e-3));
    CHECK(j["epr"]["steering"].get<bool>());
    CHECK(j["duan_simon"]["value"].get<double>() ==
          doctest::Approx(1.12 * std::exp(-1.76)).epsilon(1e-10));
    CHECK(j["duan_simon"]["inseparable"].get<bool>());
    CHECK(j["metadata"]["config_hash"].get<std::string>() == cfg.hash());
}

TEST_CASE("widths artifacts") {
    const auto dir = fresh_dir("widths");
    const auto cfg = scenario::parse_config(
        R"({"oscillator": {"omega_khz": 125.0}, "protocol": {"r": 0.0}})");
    scenario::run_scenario("widths", cfg, dir);

    SUBCASE("zero squeeze keeps the vacuum width") {
        const auto t = io::read_table(dir / "widths_epr.csv");
        REQUIRE(!t.rows.empty());
        for (const auto& row : t.rows) CHECK(row[1] == doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("round trip reproduces the in-memory trace exactly") {
        const auto cfg2 = scenario::parse_config(
            R"({"oscillator": {"omega_khz": 125.0, "omega_prime_khz": 37.26},
                "cooling": {"nbar0": 0.06}})");
        scenario::run_scenario("widths", cfg2, dir);
        const auto t = io::read_table(dir / "widths_inphase.csv");
        protocol::TwoModeProtocol proto(cfg2.oscillator(), 0.0, cfg2.nbar0);
        REQUIRE(t.rows.size() == static_cast<size_t>(cfg2.time_points));
        for (size_t i = 0; i < t.rows.size(); ++i) {
            const double t_us = cfg2.time_max_us * static_cast<double>(i) /
                                (cfg2.time_points - 1);
            const double w = std::sqrt(proto.state_at(t_us * 1e-6).variance(1));
            CHECK(t.rows[i][1] == w); // exact: %.17g round trip
        }
    }

    SUBCASE("schedule rows carry the jump timing") {
        const auto cfg2 = scenario::parse_config(
            R"({"oscillator": {"omega_khz": 125.0, "omega_prime_khz": 37.26}})");
        scenario::run_scenario("widths", cfg2, dir);
        const auto t = io::read_table(dir / "jump_schedule.csv");
        REQUIRE(t.rows.size() == 2);
        CHECK(t.rows[0][1] == doctest::Approx(37.26e3).epsilon(1e-12));
        CHECK(t.rows[1][0] ==
              doctest::Approx(1e6 * std::numbers::pi / (2.0 * 2.0 * std::numbers::pi * 37.26e3))
                  .epsilon(1e-12));
    }
}

TEST_CASE("library-level determinism of artifacts") {
    const auto cfg = scenario::parse_config(k_paper_json, {"grids.tau_max_us=40",
                                                           "grids.time_points=17"});
    const auto d1 = fresh_dir("det1");
    const auto d2 = fresh_dir("det2");
    for (const std::string sub : {"criteria", "widths", "velocimetry", "fock"}) {
        scenario::run_scenario(sub, cfg, d1);
        scenario::run_scenario(sub, cfg, d2);
    }
    for (const auto& entry : fs::directory_iterator(d1)) {
        const auto other = d2 / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
    }
}

TEST_CASE("unknown subcommand is a config error") {
    const auto cfg = scenario::parse_config(k_paper_json);
    CHECK_THROWS_AS(scenario::run_scenario("frobnicate", cfg, fresh_dir("bad")), ConfigError);
}

TEST_CASE("echo artifact fits its own envelope") {
    const auto dir = fresh_dir("echo");
    const auto cfg = scenario::parse_config(R"({
        "oscillator": {"omega_khz": 125.0},
        "protocol": {"r": 0.8},
        "cooling": {"nbar0": 0.06},
        "inhomogeneity": {"target_decay_us": 60.0},
        "grids": {"tau_max_us": 150.0, "tau_step_us": 0.5}
    })");
    const std::string summary = scenario::run_scenario("echo", cfg, dir);
    CHECK(summary.find("fitted decay_us=") != std::string::npos);
    const auto j = nlohmann::json::parse(slurp(dir / "echo_fit.json"));
    CHECK(j["fit"]["decay_us"].get<double>() == doctest::Approx(60.0).epsilon(0.08));
    CHECK(j["fit"]["period_us"].get<double>() == doctest::Approx(4.0).epsilon(0.01));
    const auto t = io::read_table(dir / "echo.csv");
    CHECK(t.rows.size() == 301);
}

TEST_CASE("wigner artifacts normalize") {
    const auto dir = fresh_dir("wigner");
    const auto cfg = scenario::parse_config(k_paper_json, {"grids.wigner_points=61",
                                                           "grids.wigner_extent=4.0"});
    scenario::run_scenario("wigner", cfg, dir);
    for (const char* name : {"wigner_px_x.csv", "wigner_py_y.csv", "wigner_py_px.csv",
                             "wigner_pxp_xp.csv"}) {
        std::ifstream is(dir / name);
        REQUIRE(is.good());
        std::string line;
        int rows = 0;
        while (std::getline(is, line))
            if (!line.empty() && line[0] != '#') ++rows;
        CHECK(rows == 62); // header + 61 coordinate rows
    }
}
