// Times the OpenMP drivers against their serial reference paths on the
// largest shipped problem sizes. Not a correctness gate (the parallel
// test suite covers exact agreement); run it to sanity-check scaling.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "eai/experiments.hpp"
#include "eai/interferometry.hpp"

namespace {

using namespace eai;
using clock_type = std::chrono::steady_clock;

double best_ms(int reps, const std::function<void()>& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clock_type::now();
        f();
        const auto t1 = clock_type::now();
        best = std::min(
            best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void row(const char* name, int reps, const std::function<void(Exec)>& f) {
    const double serial = best_ms(reps, [&] { f(Exec::Seq); });
    const double parallel = best_ms(reps, [&] { f(Exec::Par); });
    std::printf("%-22s %10.2f %10.2f %8.2fx\n", name, serial, parallel,
                serial / parallel);
}

ProbeSet line_probes(int count, double y) {
    std::vector<Probe> probes;
    for (int i = 0; i < count; ++i) {
        const double x = -5.0 + 10.0 * i / (count - 1);
        probes.push_back(Probe{Vec3(x, y, 0.0), Vec3(0, 0, 1),
                               GreenOptions::near_only()});
    }
    return ProbeSet(std::move(probes));
}

}  // namespace

int main() {
    const DipoleSystem chain21 = make_chain(21, 0.2, 300.0, 20.0, 0.5);
    const DipoleSystem chain11 = make_chain(11, 0.1, 300.0, 20.0, 0.0005);
    const double omega42 = units::omega_from_ghz(42.0);
    const double omega300 = units::omega_from_ghz(300.0);
    const GreenOptions full{};

    Scenario sweep;
    sweep.name = "bench";
    sweep.system = chain21;
    sweep.source = Probe{Vec3(0, 1, 0), Vec3(0, 0, 1), full};
    sweep.grid = FrequencyGrid{10.0, 550.0, 1.0};

    const ProbeSet probes15 = line_probes(15, 1.0);
    const ProbeSet probes31 = line_probes(31, 1.0);

    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-22s %10s %10s %9s\n", "kernel", "serial ms", "openmp ms",
                "speedup");

    row("build_M n=21 x200", 5, [&](Exec exec) {
        for (int i = 0; i < 200; ++i) {
            build_M(chain21, omega42, full, exec);
        }
    });
    row("spectrum 541 pts n=21", 3,
        [&](Exec exec) { spectrum_sweep(sweep, exec); });
    row("measure_H 15 probes", 3, [&](Exec exec) {
        measure_H(chain11, omega300, full, probes15, 16, NoiseModel{}, exec);
    });
    row("measure_H 31 probes", 3, [&](Exec exec) {
        measure_H(chain21, omega42, full, probes31, 16, NoiseModel{}, exec);
    });
    row("convergence n=11", 3, [&](Exec exec) {
        convergence_study(chain11, omega300, full, probes15, 15, 1e-10, exec);
    });
    return 0;
}
