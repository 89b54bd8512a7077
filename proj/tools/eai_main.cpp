#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eai/config.hpp"
#include "eai/csv.hpp"

namespace {

using namespace eai;

std::string env_or(const char* name, const std::string& fallback) {
    const char* value = std::getenv(name);
    return value != nullptr ? std::string(value) : fallback;
}

std::string freq_tag(double f_ghz) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", f_ghz);
    return buf;
}

std::string out_path(const io::RunConfig& cfg, const Scenario& sc,
                     const std::string& command, const std::string& tag) {
    const std::filesystem::path dir =
        cfg.out_dir.empty() ? "." : cfg.out_dir;
    return (dir / (sc.name + "_" + command + "_" + tag + ".csv")).string();
}

Scenario load(const io::RunConfig& cfg) {
    Scenario sc = io::load_scenario_file(
        io::resolve_scenario_path(cfg.scenario, cfg.scenario_dir));
    io::apply_overrides(sc, cfg);
    return sc;
}

double pick_freq(const io::RunConfig& cfg, const Scenario& sc) {
    const double f = cfg.freq_ghz > 0.0 ? cfg.freq_ghz : sc.recover_freq_ghz;
    if (!(f > 0.0)) {
        throw config_error("no frequency: pass --freq or set recover_freq_ghz");
    }
    return f;
}

NoiseModel noise_of(const io::RunConfig& cfg) {
    return NoiseModel{cfg.noise_snr, cfg.seed};
}

int run_spectrum(const io::RunConfig& cfg) {
    const Scenario sc = load(cfg);
    const SpectrumResult result = spectrum_sweep(sc, Exec::Par);
    const std::string path = out_path(
        cfg, sc, "spectrum",
        freq_tag(sc.grid.start_ghz) + "-" + freq_tag(sc.grid.stop_ghz));
    io::write_csv(io::spectrum_table(result), path);
    std::printf("%s: %zu frequency points -> %s\n", sc.name.c_str(),
                result.freq_ghz.size(), path.c_str());
    std::printf("peaks (GHz, power):\n");
    for (const Peak& p : result.peaks) {
        std::printf("  %10.3f  %.6e\n", p.freq_ghz, p.power);
    }
    return 0;
}

int run_scan(const io::RunConfig& cfg) {
    const Scenario sc = load(cfg);
    const double f = pick_freq(cfg, sc);
    const auto rows = line_scan(sc, f, Exec::Par);
    const std::string param_name =
        sc.scan.kind == ScanPath::Kind::Line ? "x_mm" : "angle_deg";
    const std::string path = out_path(cfg, sc, "scan", freq_tag(f));
    io::write_csv(io::scan_table(rows, param_name), path);
    double wmin = rows[0].second, wmax = rows[0].second;
    for (const auto& [param, w] : rows) {
        wmin = std::min(wmin, w);
        wmax = std::max(wmax, w);
    }
    std::printf("%s: scan at %g GHz, %zu positions -> %s\n", sc.name.c_str(), f,
                rows.size(), path.c_str());
    std::printf("power range [%.6e, %.6e]\n", wmin, wmax);
    return 0;
}

int run_fringe(const io::RunConfig& cfg) {
    const Scenario sc = load(cfg);
    const double f = pick_freq(cfg, sc);
    if (sc.probes.size() < 2) {
        throw config_error("fringe needs a scenario with at least two probes");
    }
    if (cfg.pair_a < 0 || cfg.pair_b < 0 || cfg.pair_a >= sc.probes.size() ||
        cfg.pair_b >= sc.probes.size() || cfg.pair_a == cfg.pair_b) {
        throw config_error("--pair indices out of range or equal");
    }
    const int steps = cfg.phase_steps > 0 ? cfg.phase_steps : 16;
    const double omega = units::omega_from_ghz(f);
    const auto sweep =
        fringe_sweep(sc.system, omega, sc.scatter_opts, sc.probes[cfg.pair_a],
                     sc.probes[cfg.pair_b], steps, noise_of(cfg));
    const FringeTerms terms = extract_fringe(sweep);
    const std::string path = out_path(cfg, sc, "fringe", freq_tag(f));
    io::write_csv(io::fringe_table(sweep), path);
    std::printf("%s: fringe of probes (%d, %d) at %g GHz -> %s\n",
                sc.name.c_str(), cfg.pair_a, cfg.pair_b, f, path.c_str());
    std::printf("H_aa+H_bb = %.9e, |H_ab| = %.9e, arg = %.4f deg\n",
                terms.w_a_plus_b, std::abs(terms.h_ab),
                std::arg(terms.h_ab) * 180.0 / 3.14159265358979323846);
    return 0;
}

int run_visibility(const io::RunConfig& cfg, double reference,
                   bool have_reference) {
    const Scenario sc = load(cfg);
    const double f = pick_freq(cfg, sc);
    const double ref = have_reference ? reference : sc.reference_param;
    const int steps = cfg.phase_steps > 0 ? cfg.phase_steps : 16;
    const auto rows = visibility_scan(sc, f, ref, steps, Exec::Par);
    const std::string param_name =
        sc.scan.kind == ScanPath::Kind::Line ? "x_mm" : "angle_deg";
    const std::string path = out_path(cfg, sc, "visibility", freq_tag(f));
    io::write_csv(io::visibility_table(rows, param_name), path);
    double lo = rows[0].amplitude, hi = rows[0].amplitude;
    for (const auto& r : rows) {
        lo = std::min(lo, r.amplitude);
        hi = std::max(hi, r.amplitude);
    }
    std::printf("%s: visibility at %g GHz, reference %g -> %s\n",
                sc.name.c_str(), f, ref, path.c_str());
    std::printf("|gamma| range [%.6f, %.6f]\n", lo, hi);
    return 0;
}

int run_recover(const io::RunConfig& cfg) {
    const Scenario sc = load(cfg);
    const double f = pick_freq(cfg, sc);
    const double omega = units::omega_from_ghz(f);
    if (sc.probes.size() == 0) {
        throw config_error("recover needs a scenario with probes");
    }
    const int s = cfg.probes > 0 ? cfg.probes : sc.probes.size();
    const ProbeSet subset = sc.probes.prefix(s);
    const int steps = cfg.phase_steps > 0 ? cfg.phase_steps : 16;
    const double rel_tol = cfg.pinv_tol > 0.0 ? cfg.pinv_tol : 1e-10;
    const HMatrix h = measure_H(sc.system, omega, sc.scatter_opts, subset,
                                steps, noise_of(cfg), Exec::Par);
    const ModeSet rec =
        recover_modes(h, subset, sc.system, omega, sc.scatter_opts, rel_tol);
    const std::string path = out_path(cfg, sc, "recover", freq_tag(f));
    io::write_csv(io::mode_table(rec), path);
    std::printf("%s: recovery at %g GHz with %d probes -> %s\n",
                sc.name.c_str(), f, s, path.c_str());
    std::printf("responsivities:");
    for (int m = 0; m < std::min<int>(rec.numerical_rank + 1,
                                      static_cast<int>(rec.gamma.size()));
         ++m) {
        std::printf(" %.6e", rec.gamma(m));
    }
    std::printf("\n");
    if (rec.partial) {
        std::printf("warning: partial recovery, numerical rank %d is below "
                    "the system's mode count\n",
                    rec.numerical_rank);
    }
    return 0;
}

int run_converge(const io::RunConfig& cfg) {
    const Scenario sc = load(cfg);
    const double f = pick_freq(cfg, sc);
    const double omega = units::omega_from_ghz(f);
    if (sc.probes.size() < 2) {
        throw config_error("converge needs a scenario with at least two probes");
    }
    const int max_probes =
        cfg.probes > 0 ? std::min(cfg.probes, sc.probes.size())
                       : sc.probes.size();
    const double rel_tol = cfg.pinv_tol > 0.0 ? cfg.pinv_tol : 1e-10;
    const auto curve = convergence_study(sc.system, omega, sc.scatter_opts,
                                         sc.probes, max_probes, rel_tol,
                                         Exec::Par);
    const std::string path = out_path(cfg, sc, "converge", freq_tag(f));
    io::write_csv(io::convergence_table(curve), path);
    std::printf("%s: convergence at %g GHz -> %s\n", sc.name.c_str(), f,
                path.c_str());
    for (const auto& [s, err] : curve) {
        std::printf("  S=%2d  error %.3e\n", s, err);
    }
    return 0;
}

int regress_one(const io::RunConfig& cfg, const std::string& name) {
    io::RunConfig local = cfg;
    local.scenario = name;
    const Scenario sc = load(local);
    const RegressionReport report = run_regression(sc, Exec::Par);
    std::printf("%s:\n", sc.name.c_str());
    for (const auto& check : report.checks) {
        std::printf("  [%s] %s: %s\n", check.pass ? "PASS" : "FAIL",
                    check.label.c_str(), check.detail.c_str());
    }
    if (sc.probes.size() > 0 && sc.recover_freq_ghz > 0.0) {
        const double omega = units::omega_from_ghz(sc.recover_freq_ghz);
        const HMatrix h =
            measure_H(sc.system, omega, sc.scatter_opts, sc.probes, 16,
                      NoiseModel{}, Exec::Par);
        const std::string path =
            out_path(cfg, sc, "regress", freq_tag(sc.recover_freq_ghz));
        io::write_csv(io::h_table(h.h), path);
        std::printf("  H matrix (amplitude/phase blocks) -> %s\n",
                    path.c_str());
    }
    return report.all_pass() ? 0 : 2;
}

int run_regress(const io::RunConfig& cfg, bool all) {
    if (!all) {
        return regress_one(cfg, cfg.scenario);
    }
    int status = 0;
    for (const std::string& name : io::list_scenarios(cfg.scenario_dir)) {
        status = std::max(status, regress_one(cfg, name));
    }
    return status;
}

int run_list(const io::RunConfig& cfg) {
    for (const std::string& name : io::list_scenarios(cfg.scenario_dir)) {
        std::printf("%s\n", name.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy absorption interferometry on coupled surface dipoles"};
    app.require_subcommand(1);

    io::RunConfig cfg;
    cfg.scenario_dir = env_or("EAI_SCENARIO_DIR", "scenarios");
    cfg.out_dir = env_or("EAI_OUT_DIR", ".");
    bool regress_all = false;
    double reference = 0.0;
    bool have_reference = false;

    const auto add_common = [&](CLI::App* sub, bool needs_scenario) {
        if (needs_scenario) {
            sub->add_option("--scenario", cfg.scenario,
                            "scenario name or path to a scenario file");
        }
        sub->add_option("--scenario-dir", cfg.scenario_dir,
                        "directory with scenario files");
        sub->add_option("--out", cfg.out_dir, "output directory for CSV files");
        sub->add_option("--threads", cfg.threads, "worker thread count");
    };

    CLI::App* spectrum = app.add_subcommand(
        "spectrum", "absorbed power across the frequency grid");
    add_common(spectrum, true);
    spectrum->add_option("--grid-start", cfg.grid_start_ghz, "grid start, GHz");
    spectrum->add_option("--grid-stop", cfg.grid_stop_ghz, "grid stop, GHz");
    spectrum->add_option("--grid-step", cfg.grid_step_ghz, "grid step, GHz");

    CLI::App* scan =
        app.add_subcommand("scan", "absorbed power along the scan path");
    add_common(scan, true);
    scan->add_option("--freq", cfg.freq_ghz, "frequency, GHz");

    CLI::App* fringe =
        app.add_subcommand("fringe", "differential-phase fringe of two probes");
    add_common(fringe, true);
    fringe->add_option("--freq", cfg.freq_ghz, "frequency, GHz");
    fringe->add_option("--pair-a", cfg.pair_a, "first probe index");
    fringe->add_option("--pair-b", cfg.pair_b, "second probe index");
    fringe->add_option("--phase-steps", cfg.phase_steps, "phase grid size");
    fringe->add_option("--noise-snr", cfg.noise_snr,
                       "signal-to-noise ratio for measurement noise (0 = off)");
    fringe->add_option("--seed", cfg.seed, "noise seed");

    CLI::App* visibility = app.add_subcommand(
        "visibility", "fringe visibility along the scan path");
    add_common(visibility, true);
    visibility->add_option("--freq", cfg.freq_ghz, "frequency, GHz");
    visibility->add_option("--phase-steps", cfg.phase_steps, "phase grid size");
    visibility->add_option("--reference", reference,
                           "reference position on the scan path")
        ->each([&](const std::string&) { have_reference = true; });

    CLI::App* recover = app.add_subcommand(
        "recover", "recover dynamical modes from fringe-measured H");
    add_common(recover, true);
    recover->add_option("--freq", cfg.freq_ghz, "frequency, GHz");
    recover->add_option("--probes", cfg.probes, "number of probes (prefix)");
    recover->add_option("--phase-steps", cfg.phase_steps, "phase grid size");
    recover->add_option("--pinv-tol", cfg.pinv_tol,
                        "relative pseudo-inverse truncation");
    recover->add_option("--probe-terms", cfg.probe_terms,
                        "override probe dyadic terms (near/far/full/...)");
    recover->add_option("--noise-snr", cfg.noise_snr,
                        "signal-to-noise ratio for measurement noise");
    recover->add_option("--seed", cfg.seed, "noise seed");

    CLI::App* converge = app.add_subcommand(
        "converge", "recovery error vs number of probes");
    add_common(converge, true);
    converge->add_option("--freq", cfg.freq_ghz, "frequency, GHz");
    converge->add_option("--probes", cfg.probes, "largest probe count");
    converge->add_option("--pinv-tol", cfg.pinv_tol,
                         "relative pseudo-inverse truncation");
    converge->add_option("--probe-terms", cfg.probe_terms,
                         "override probe dyadic terms");

    CLI::App* regress = app.add_subcommand(
        "regress", "evaluate a scenario's recorded expectations");
    add_common(regress, true);
    regress->add_flag("--all", regress_all, "run every scenario in the directory");

    CLI::App* list =
        app.add_subcommand("list-scenarios", "names of available scenarios");
    add_common(list, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    }

    if (cfg.threads > 0) {
        omp_set_num_threads(cfg.threads);
    }

    try {
        if (spectrum->parsed()) {
            return run_spectrum(cfg);
        }
        if (scan->parsed()) {
            return run_scan(cfg);
        }
        if (fringe->parsed()) {
            return run_fringe(cfg);
        }
        if (visibility->parsed()) {
            return run_visibility(cfg, reference, have_reference);
        }
        if (recover->parsed()) {
            return run_recover(cfg);
        }
        if (converge->parsed()) {
            return run_converge(cfg);
        }
        if (regress->parsed()) {
            return run_regress(cfg, regress_all);
        }
        if (list->parsed()) {
            return run_list(cfg);
        }
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
