#pragma once

#include <string>
#include <vector>

#include "eai/experiments.hpp"

namespace eai::io {

// Scenario files are JSON; the schema is documented in the README.
// Parse errors throw config_error naming the file and offending field.
Scenario parse_scenario(const std::string& json_text,
                        const std::string& origin = "<string>");
Scenario load_scenario_file(const std::string& path);

// Names (file stems) of every *.json in `dir`, sorted.
std::vector<std::string> list_scenarios(const std::string& dir);

// Accepts either a bare scenario name (resolved against `dir`) or an
// explicit path to a scenario file.
std::string resolve_scenario_path(const std::string& name_or_path,
                                  const std::string& dir);

enum class Command {
    Spectrum,
    Scan,
    Fringe,
    Visibility,
    Recover,
    Converge,
    Regress,
    ListScenarios,
};

// Everything the CLI layer hands to a run: the scenario plus typed
// overrides. Negative sentinel values mean "keep the scenario default".
struct RunConfig {
    Command command = Command::Regress;
    std::string scenario;
    std::string scenario_dir;
    std::string out_dir;

    double freq_ghz = -1.0;
    double grid_start_ghz = -1.0;
    double grid_stop_ghz = -1.0;
    double grid_step_ghz = -1.0;
    int probes = -1;
    int pair_a = 0;
    int pair_b = 1;
    int phase_steps = -1;
    double pinv_tol = -1.0;
    double noise_snr = 0.0;
    unsigned long long seed = 0;
    int threads = 0;
    std::string probe_terms;  // "near" | "far" | "full"
};

// Dyadic term spec used throughout scenario files: "full" or a
// '+'-joined subset of near/intermediate/far, e.g. "near+far".
GreenOptions parse_terms(const std::string& spec,
                         Prefactor prefactor = Prefactor::OmegaMu0);

// Applies grid / probe-term overrides in place; validates the result.
void apply_overrides(Scenario& scenario, const RunConfig& config);

}  // namespace eai::io
