#pragma once

#include <string>
#include <utility>
#include <vector>

#include "eai/interferometry.hpp"

namespace eai {

// Uniform frequency grid in ordinary GHz. The 1 GHz default step is what
// every quoted resonance tolerance is calibrated against.
struct FrequencyGrid {
    double start_ghz = 150.0;
    double stop_ghz = 450.0;
    double step_ghz = 1.0;

    std::vector<double> points() const;
    void validate() const;
};

// Local maximum of a sampled curve, refined by fitting a parabola through
// the three samples around the grid maximum.
struct Peak {
    double freq_ghz;
    double power;
};

// Strict interior maxima of `values` over `grid_points`; quadratic
// refinement of both abscissa and height.
std::vector<Peak> find_peaks(const std::vector<double>& grid_points,
                             const std::vector<double>& values);

// Full width at half maximum around the highest peak, with linear
// interpolation at the half-power crossings. Returns 0 when a crossing
// lies outside the grid.
double fwhm(const std::vector<double>& grid_points,
            const std::vector<double>& values);

// Probe path for scan-type experiments: straight line between two points
// or a circle in the z = 0 plane. `param(i)` is the published abscissa
// (x in mm for lines, angle in degrees for circles).
struct ScanPath {
    enum class Kind { Line, Circle };

    Kind kind = Kind::Line;
    Vec3 start{0, 0, 0};
    Vec3 end{0, 0, 0};
    Vec3 center{0, 0, 0};
    double radius = 0.0;
    double angle_start_deg = 0.0;
    double angle_stop_deg = 360.0;
    int samples = 101;
    Vec3 polarization{0, 0, 1};
    GreenOptions source_opts{};

    Vec3 point(int i) const;
    double param(int i) const;
    Probe probe(int i) const;
    Probe probe_at(double param_value) const;
    void validate() const;
};

// One machine-checkable expectation. `kind` selects the evaluator in
// run_regression; the generic fields carry whatever that evaluator
// needs (documented per kind in the scenario schema).
struct Expectation {
    std::string kind;
    std::string label;
    double freq_ghz = 0.0;
    double tol = 0.0;
    std::vector<double> values;
    std::vector<int> indices;
    std::string text;
    bool expect_fail = false;
};

// A complete simulated experiment: the dipole system, how it is driven,
// how it is sampled, and what the run is expected to show.
struct Scenario {
    std::string name;
    std::string title;
    DipoleSystem system{std::vector<Dipole>{}};
    GreenOptions scatter_opts{};
    Probe source;
    FrequencyGrid grid;
    ProbeSet probes;
    double recover_freq_ghz = 0.0;
    ScanPath scan;
    bool has_scan = false;
    double reference_param = 0.0;
    std::vector<Expectation> expectations;
};

struct SpectrumResult {
    std::vector<double> freq_ghz;
    std::vector<double> power;
    std::vector<Peak> peaks;
};

// Absorbed power of the scenario source across the frequency grid,
// with detected peaks.
SpectrumResult spectrum_sweep(const Scenario& scenario, Exec exec = Exec::Par);

// Absorbed power as the scan-path source moves, at a fixed frequency.
std::vector<std::pair<double, double>> line_scan(const Scenario& scenario,
                                                 double freq_ghz,
                                                 Exec exec = Exec::Par);

struct VisibilityRow {
    double param;
    double amplitude;
    double phase_deg;
};

// Fringe visibility of every scan-path position against a fixed
// reference probe placed at `reference_param` on the same path.
std::vector<VisibilityRow> visibility_scan(const Scenario& scenario,
                                           double freq_ghz,
                                           double reference_param,
                                           int phase_steps = 16,
                                           Exec exec = Exec::Par);

struct CheckResult {
    std::string label;
    bool pass;
    std::string detail;
};

struct RegressionReport {
    std::string scenario;
    std::vector<CheckResult> checks;
    bool all_pass() const;
};

// Evaluates every expectation the scenario carries.
RegressionReport run_regression(const Scenario& scenario, Exec exec = Exec::Par);

}  // namespace eai
