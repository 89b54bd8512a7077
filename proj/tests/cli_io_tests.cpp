#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "doctest.h"
#include "eai/config.hpp"
#include "eai/csv.hpp"

using namespace eai;
using namespace eai::io;

namespace {

std::string scenario_dir() {
    const char* dir = std::getenv("EAI_SCENARIO_DIR");
    REQUIRE_MESSAGE(dir != nullptr, "EAI_SCENARIO_DIR must point at scenarios/");
    return dir;
}

bool same_bits(double a, double b) {
    return std::memcmp(&a, &b, sizeof(double)) == 0;
}

const char* kMinimalScenario = R"({
  "system": {
    "dipoles": [
      {"position": [0, 0, 0], "f0_ghz": 300, "gamma_ghz": 20, "alpha_e": 0.005}
    ]
  },
  "source": {"position": [10, 10, 0]}
})";

}  // namespace

TEST_SUITE("cli_io") {

TEST_CASE("format_double round-trips bit exactly") {
    for (double v : {1.0 / 3.0, 1e300, 1.5, 0.0, -0.0, -2.75e-17,
                     std::numbers::pi, 5e-324, -123456789.123456789}) {
        const std::string text = format_double(v);
        const double back = std::strtod(text.c_str(), nullptr);
        CAPTURE(text);
        CHECK(same_bits(v, back));
    }
}

TEST_CASE("csv_escape quotes only when needed") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("1.25e-3") == "1.25e-3");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
    CHECK(csv_escape("") == "");
}

TEST_CASE("to_csv renders header and rows with a trailing newline") {
    Table t;
    t.header = {"a", "b"};
    t.rows = {{"1", "2"}, {"x,y", "3"}};
    CHECK(to_csv(t) == "a,b\n1,2\n\"x,y\",3\n");

    Table empty;
    empty.header = {"only", "header"};
    CHECK(to_csv(empty) == "only,header\n");
}

TEST_CASE("write_csv round-trips through the filesystem") {
    Table t;
    t.header = {"freq_ghz", "power"};
    t.rows = {{format_double(240.0), format_double(1.0 / 3.0)}};
    const auto path =
        std::filesystem::temp_directory_path() / "eai_csv_roundtrip.csv";
    write_csv(t, path.string());
    std::ifstream in(path, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    CHECK(content == to_csv(t));
    std::filesystem::remove(path);

    CHECK_THROWS_AS(write_csv(t, "/nonexistent-dir-xyz/out.csv"), config_error);
}

TEST_CASE("h_table lays out an amplitude block above a phase block") {
    CMat h(2, 2);
    h(0, 0) = 2.0;
    h(1, 1) = 3.0;
    h(0, 1) = cd(1.0, 1.0);
    h(1, 0) = cd(1.0, -1.0);
    const Table t = h_table(h);
    REQUIRE(t.header.size() == 4);
    CHECK(t.header[0] == "block");
    CHECK(t.header[2] == "probe0");
    CHECK(t.header[3] == "probe1");
    REQUIRE(t.rows.size() == 4);
    CHECK(t.rows[0][0] == "amplitude");
    CHECK(t.rows[1][0] == "amplitude");
    CHECK(t.rows[2][0] == "phase_deg");
    CHECK(t.rows[3][0] == "phase_deg");
    CHECK(t.rows[0][2] == format_double(2.0));
    CHECK(t.rows[1][3] == format_double(3.0));
    CHECK(std::strtod(t.rows[0][3].c_str(), nullptr) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(std::strtod(t.rows[2][3].c_str(), nullptr) ==
          doctest::Approx(45.0).epsilon(1e-12));
    CHECK(std::strtod(t.rows[3][2].c_str(), nullptr) ==
          doctest::Approx(-45.0).epsilon(1e-12));
}

TEST_CASE("parse_terms understands full and '+'-joined subsets") {
    const GreenOptions full = parse_terms("full");
    CHECK(full.near);
    CHECK(full.intermediate);
    CHECK(full.far);
    // Empty spec falls back to the full dyadic.
    CHECK(parse_terms("").far);

    const GreenOptions nf = parse_terms("near");
    CHECK(nf.near);
    CHECK(!nf.intermediate);
    CHECK(!nf.far);

    const GreenOptions mix = parse_terms("near+far");
    CHECK(mix.near);
    CHECK(!mix.intermediate);
    CHECK(mix.far);

    CHECK(parse_terms("intermediate", Prefactor::KSquared).prefactor ==
          Prefactor::KSquared);
    CHECK_THROWS_AS(parse_terms("bogus"), config_error);
    CHECK_THROWS_AS(parse_terms("near+sideways"), config_error);
}

TEST_CASE("parse_scenario fills documented defaults") {
    const Scenario sc = parse_scenario(kMinimalScenario, "inline-test");
    CHECK(sc.name == "inline-test");
    CHECK(sc.system.size() == 1);
    CHECK(sc.system[0].axis.isApprox(Vec3(0, 0, 1)));  // default axis
    CHECK(sc.source.polarization.isApprox(Vec3(0, 0, 1)));
    CHECK(sc.source.green_opts.near);
    CHECK(sc.source.green_opts.far);
    CHECK(sc.grid.start_ghz == 150.0);
    CHECK(sc.grid.stop_ghz == 450.0);
    CHECK(sc.probes.size() == 0);
    CHECK(!sc.has_scan);
    CHECK(sc.expectations.empty());
}

TEST_CASE("parse_scenario rejects malformed input with the origin named") {
    const auto fails_with = [](const std::string& text,
                               const std::string& fragment) {
        try {
            parse_scenario(text, "bad-file");
            FAIL_CHECK("expected config_error for: " << fragment);
        } catch (const config_error& e) {
            const std::string what = e.what();
            CHECK(what.find("bad-file") != std::string::npos);
            CAPTURE(what);
            CHECK(what.find(fragment) != std::string::npos);
        }
    };

    fails_with("not json at all", "");
    fails_with("{}", "system");
    fails_with(R"({"system": {"dipoles": []}, "source": {"position": [1,2,3]}})",
               "no dipoles");
    fails_with(R"({"system": {"wedge": {}}, "source": {"position": [1,2,3]}})",
               "chain");
    fails_with(
        R"({"system": {"dipoles": [{"position": [0,0], "f0_ghz": 300,
            "gamma_ghz": 20, "alpha_e": 0.005}]},
            "source": {"position": [1,2,3]}})",
        "3-element");
    fails_with(
        R"({"system": {"chain": {"count": 2, "spacing_mm": 0.1, "f0_ghz": 300,
            "gamma_ghz": 20, "alpha_e": 0.005},
            "overrides": [{"index": 7, "alpha_e": 0.01}]},
            "source": {"position": [1,2,3]}})",
        "out of range");
    fails_with(
        R"({"system": {"chain": {"count": 2, "spacing_mm": 0.1, "f0_ghz": 300,
            "gamma_ghz": 20, "alpha_e": 0.005}},
            "source": {"position": [1,2,3], "terms": "warp"}})",
        "unknown dyadic term");
    fails_with(
        R"({"system": {"chain": {"count": 2, "spacing_mm": 0.1, "f0_ghz": 300,
            "gamma_ghz": 20, "alpha_e": 0.005}},
            "source": {"position": [1,2,3]},
            "scan": {"kind": "spiral", "radius": 5}})",
        "line' or 'circle");
}

TEST_CASE("scenario overrides rebuild dipoles in place") {
    const std::string text = R"({
      "system": {
        "chain": {"count": 3, "spacing_mm": 0.1, "f0_ghz": 300,
                  "gamma_ghz": 20, "alpha_e": 0.0005},
        "overrides": [{"index": 1, "alpha_e": 0.005, "f0_ghz": 310}]
      },
      "source": {"position": [0, 1, 0], "terms": "near"}
    })";
    const Scenario sc = parse_scenario(text, "override-test");
    CHECK(sc.system[0].alpha == 0.0005);
    CHECK(sc.system[1].alpha == 0.005);
    CHECK(sc.system[1].omega0 == doctest::Approx(units::omega_from_ghz(310.0)));
    CHECK(sc.system[2].alpha == 0.0005);
    // Untouched parameters survive the override.
    CHECK(sc.system[1].gamma == doctest::Approx(units::omega_from_ghz(20.0)));
    CHECK(sc.source.green_opts.near);
    CHECK(!sc.source.green_opts.far);
}

TEST_CASE("list_scenarios and resolve_scenario_path") {
    const std::string dir = scenario_dir();
    const auto names = list_scenarios(dir);
    CHECK(names.size() >= 11);
    CHECK(std::is_sorted(names.begin(), names.end()));
    for (const char* expected :
         {"two-dipole", "five-chain", "eleven-chain", "octagon-defect",
          "twentyone-chain"}) {
        CHECK(std::find(names.begin(), names.end(), expected) != names.end());
    }

    const std::string path = resolve_scenario_path("five-chain", dir);
    CHECK(path.find("five-chain.json") != std::string::npos);
    // An explicit existing path is taken verbatim.
    CHECK(resolve_scenario_path(path, "/does/not/matter") == path);
    CHECK_THROWS_AS(resolve_scenario_path("", dir), config_error);
    try {
        resolve_scenario_path("no-such-scenario", dir);
        FAIL_CHECK("expected a config_error listing alternatives");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("available:") != std::string::npos);
        CHECK(std::string(e.what()).find("five-chain") != std::string::npos);
    }
    CHECK_THROWS_AS(load_scenario_file(dir + "/no-such-file.json"),
                    config_error);
}

TEST_CASE("apply_overrides rewrites grid and probe terms") {
    Scenario sc = load_scenario_file(
        resolve_scenario_path("five-chain", scenario_dir()));
    RunConfig cfg;
    cfg.grid_start_ghz = 200.0;
    cfg.grid_stop_ghz = 260.0;
    cfg.grid_step_ghz = 2.0;
    cfg.probe_terms = "far";
    apply_overrides(sc, cfg);
    CHECK(sc.grid.start_ghz == 200.0);
    CHECK(sc.grid.stop_ghz == 260.0);
    CHECK(sc.grid.step_ghz == 2.0);
    for (const Probe& p : sc.probes.probes()) {
        CHECK(p.green_opts.far);
        CHECK(!p.green_opts.near);
        CHECK(!p.green_opts.intermediate);
    }

    RunConfig broken;
    broken.grid_start_ghz = 500.0;  // start beyond the scenario stop
    CHECK_THROWS_AS(apply_overrides(sc, broken), config_error);
}

TEST_CASE("identical seeds render byte-identical tables") {
    const DipoleSystem sys = make_chain(2, 0.1, 300.0, 20.0, 0.005);
    const double omega = units::omega_from_ghz(240.0);
    std::vector<Probe> probes;
    for (double x : {0.0, 2.0, -3.0}) {
        probes.push_back(Probe{Vec3(x, 5, 0), Vec3(0, 0, 1), {}});
    }
    const NoiseModel noise{50.0, 123};
    const auto render = [&] {
        const HMatrix h = measure_H(sys, omega, {}, ProbeSet(probes), 16,
                                    noise, Exec::Seq);
        return to_csv(h_table(h.h));
    };
    const std::string first = render();
    CHECK(render() == first);
    const NoiseModel other{50.0, 124};
    const HMatrix h2 =
        measure_H(sys, omega, {}, ProbeSet(probes), 16, other, Exec::Seq);
    CHECK(to_csv(h_table(h2.h)) != first);
}

}  // TEST_SUITE
