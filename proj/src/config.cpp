#include "eai/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace eai::io {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw config_error(origin + ": " + what);
}

Vec3 parse_vec3(const json& j, const std::string& origin,
                const std::string& field) {
    if (!j.is_array() || j.size() != 3) {
        fail(origin, "field '" + field + "' must be a 3-element array");
    }
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

GreenOptions parse_terms_impl(const std::string& spec, Prefactor prefactor,
                              const std::string& origin) {
    GreenOptions opts;
    opts.prefactor = prefactor;
    if (spec.empty() || spec == "full") {
        return opts;
    }
    opts.near = opts.intermediate = opts.far = false;
    std::stringstream ss(spec);
    std::string token;
    while (std::getline(ss, token, '+')) {
        if (token == "near") {
            opts.near = true;
        } else if (token == "intermediate") {
            opts.intermediate = true;
        } else if (token == "far") {
            opts.far = true;
        } else {
            fail(origin, "unknown dyadic term '" + token +
                             "' (use near/intermediate/far or full)");
        }
    }
    opts.validate();
    return opts;
}

GreenOptions terms_of(const json& j, const std::string& origin,
                      const std::string& fallback = "full") {
    return parse_terms_impl(j.value("terms", fallback), Prefactor::OmegaMu0,
                            origin);
}

DipoleSystem parse_system(const json& j, const std::string& origin) {
    std::vector<Dipole> dipoles;
    if (j.contains("chain")) {
        const json& c = j["chain"];
        dipoles = make_chain(c.at("count").get<int>(),
                             c.value("spacing_mm", 0.0),
                             c.at("f0_ghz").get<double>(),
                             c.at("gamma_ghz").get<double>(),
                             c.at("alpha_e").get<double>())
                      .dipoles();
    } else if (j.contains("ring")) {
        const json& r = j["ring"];
        dipoles = make_ring(r.at("count").get<int>(),
                            r.at("side_mm").get<double>(),
                            r.at("f0_ghz").get<double>(),
                            r.at("gamma_ghz").get<double>(),
                            r.at("alpha_e").get<double>())
                      .dipoles();
    } else if (j.contains("dipoles")) {
        for (const json& d : j["dipoles"]) {
            dipoles.push_back(Dipole::make(
                parse_vec3(d.at("position"), origin, "position"),
                d.contains("axis") ? parse_vec3(d["axis"], origin, "axis")
                                   : Vec3(0, 0, 1),
                d.at("f0_ghz").get<double>(), d.at("gamma_ghz").get<double>(),
                d.at("alpha_e").get<double>()));
        }
    } else {
        fail(origin, "system needs one of 'chain', 'ring' or 'dipoles'");
    }
    if (dipoles.empty()) {
        fail(origin, "system has no dipoles");
    }

    for (const json& o : j.value("overrides", json::array())) {
        const int idx = o.at("index").get<int>();
        if (idx < 0 || idx >= static_cast<int>(dipoles.size())) {
            fail(origin, "override index " + std::to_string(idx) +
                             " out of range");
        }
        Dipole& d = dipoles[idx];
        const double f0 =
            o.value("f0_ghz", units::ghz_from_omega(d.omega0));
        const double gamma =
            o.value("gamma_ghz", units::ghz_from_omega(d.gamma));
        const double alpha = o.value("alpha_e", d.alpha);
        const Vec3 pos = o.contains("position")
                             ? parse_vec3(o["position"], origin, "position")
                             : d.position;
        const Vec3 axis =
            o.contains("axis") ? parse_vec3(o["axis"], origin, "axis") : d.axis;
        d = Dipole::make(pos, axis, f0, gamma, alpha);
    }
    return DipoleSystem(std::move(dipoles));
}

ProbeSet parse_probes(const json& j, const std::string& origin) {
    const GreenOptions opts = terms_of(j, origin);
    const Vec3 shared_pol = j.contains("polarization")
                                ? parse_vec3(j["polarization"], origin,
                                             "polarization")
                                : Vec3(0, 0, 1);
    std::vector<Probe> probes;
    for (const json& p : j.at("positions")) {
        probes.push_back(
            Probe{parse_vec3(p, origin, "positions"), shared_pol, opts});
    }
    return ProbeSet(std::move(probes));
}

ScanPath parse_scan(const json& j, const std::string& origin) {
    ScanPath path;
    const std::string kind = j.value("kind", "line");
    if (kind == "line") {
        path.kind = ScanPath::Kind::Line;
        path.start = parse_vec3(j.at("start"), origin, "start");
        path.end = parse_vec3(j.at("end"), origin, "end");
    } else if (kind == "circle") {
        path.kind = ScanPath::Kind::Circle;
        path.center = j.contains("center")
                          ? parse_vec3(j["center"], origin, "center")
                          : Vec3(0, 0, 0);
        path.radius = j.at("radius").get<double>();
        path.angle_start_deg = j.value("angle_start_deg", 0.0);
        path.angle_stop_deg = j.value("angle_stop_deg", 360.0);
    } else {
        fail(origin, "scan kind must be 'line' or 'circle'");
    }
    path.samples = j.value("samples", 101);
    path.polarization = j.contains("polarization")
                            ? parse_vec3(j["polarization"], origin,
                                         "polarization")
                            : Vec3(0, 0, 1);
    path.source_opts = terms_of(j, origin);
    path.validate();
    return path;
}

Expectation parse_expectation(const json& j) {
    Expectation ex;
    ex.kind = j.at("kind").get<std::string>();
    ex.label = j.value("label", ex.kind);
    ex.freq_ghz = j.value("freq_ghz", 0.0);
    ex.tol = j.value("tol", 0.0);
    ex.text = j.value("text", "");
    ex.expect_fail = j.value("expect_fail", false);
    for (const json& v : j.value("values", json::array())) {
        ex.values.push_back(v.get<double>());
    }
    for (const json& v : j.value("indices", json::array())) {
        ex.indices.push_back(v.get<int>());
    }
    return ex;
}

}  // namespace

GreenOptions parse_terms(const std::string& spec, Prefactor prefactor) {
    return parse_terms_impl(spec, prefactor, "terms override");
}

Scenario parse_scenario(const std::string& json_text,
                        const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(origin, e.what());
    }
    try {
        Scenario sc;
        sc.name = j.value("name", fs::path(origin).stem().string());
        sc.title = j.value("title", "");
        sc.system = parse_system(j.at("system"), origin);
        sc.scatter_opts = parse_terms_impl(j.value("scatter_terms", "full"),
                                           Prefactor::OmegaMu0, origin);

        const json& src = j.at("source");
        sc.source = Probe{parse_vec3(src.at("position"), origin, "position"),
                          src.contains("polarization")
                              ? parse_vec3(src["polarization"], origin,
                                           "polarization")
                              : Vec3(0, 0, 1),
                          terms_of(src, origin)};

        if (j.contains("grid")) {
            const json& g = j["grid"];
            sc.grid.start_ghz = g.value("start_ghz", sc.grid.start_ghz);
            sc.grid.stop_ghz = g.value("stop_ghz", sc.grid.stop_ghz);
            sc.grid.step_ghz = g.value("step_ghz", sc.grid.step_ghz);
        }
        sc.grid.validate();

        if (j.contains("probes")) {
            sc.probes = parse_probes(j["probes"], origin);
        }
        sc.recover_freq_ghz = j.value("recover_freq_ghz", 0.0);
        if (j.contains("scan")) {
            sc.scan = parse_scan(j["scan"], origin);
            sc.has_scan = true;
        }
        sc.reference_param = j.value("reference_param", 0.0);
        for (const json& e : j.value("expectations", json::array())) {
            sc.expectations.push_back(parse_expectation(e));
        }
        return sc;
    } catch (const json::exception& e) {
        fail(origin, e.what());
    }
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot read scenario file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path);
}

std::vector<std::string> list_scenarios(const std::string& dir) {
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.path().extension() == ".json") {
            names.push_back(entry.path().stem().string());
        }
    }
    if (ec) {
        throw config_error("cannot list scenario directory '" + dir + "'");
    }
    std::sort(names.begin(), names.end());
    return names;
}

std::string resolve_scenario_path(const std::string& name_or_path,
                                  const std::string& dir) {
    if (name_or_path.empty()) {
        throw config_error("no scenario given (use --scenario)");
    }
    if (fs::exists(name_or_path) && !fs::is_directory(name_or_path)) {
        return name_or_path;
    }
    const fs::path candidate = fs::path(dir) / (name_or_path + ".json");
    if (fs::exists(candidate)) {
        return candidate.string();
    }
    std::string msg = "scenario '" + name_or_path + "' not found in '" + dir +
                      "'";
    const auto names = list_scenarios(dir);
    if (!names.empty()) {
        msg += "; available:";
        for (const auto& n : names) {
            msg += " " + n;
        }
    }
    throw config_error(msg);
}

void apply_overrides(Scenario& scenario, const RunConfig& config) {
    if (config.grid_start_ghz > 0.0) {
        scenario.grid.start_ghz = config.grid_start_ghz;
    }
    if (config.grid_stop_ghz > 0.0) {
        scenario.grid.stop_ghz = config.grid_stop_ghz;
    }
    if (config.grid_step_ghz > 0.0) {
        scenario.grid.step_ghz = config.grid_step_ghz;
    }
    scenario.grid.validate();

    if (!config.probe_terms.empty()) {
        const GreenOptions opts =
            parse_terms(config.probe_terms, Prefactor::OmegaMu0);
        std::vector<Probe> modified = scenario.probes.probes();
        for (Probe& p : modified) {
            p.green_opts = opts;
        }
        scenario.probes = ProbeSet(std::move(modified));
    }
}

}  // namespace eai::io
