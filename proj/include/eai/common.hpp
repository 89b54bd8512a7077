#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace eai {

using cd = std::complex<double>;

// Internal unit system: geometry in mm, input frequencies in GHz,
// epsilon_0 = mu_0 = 1 with c carried explicitly. Powers come out in
// arbitrary units; only relative and normalized quantities are exposed.
namespace units {
inline constexpr double c_mm_per_s = 2.99792458e11;

inline double omega_from_ghz(double f_ghz) {
    return 2.0 * std::numbers::pi * f_ghz * 1e9;
}

inline double ghz_from_omega(double omega) {
    return omega / (2.0 * std::numbers::pi * 1e9);
}

inline double wavenumber(double omega) { return omega / c_mm_per_s; }

inline double wavelength_mm(double f_ghz) {
    return c_mm_per_s / (f_ghz * 1e9);
}
}  // namespace units

// Configuration / usage problems: CLI maps these to exit code 1.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures (singular solves, rank collapse, invalid regimes).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Execution strategy for the data-parallel kernels. Seq is the serial
// reference implementation; Par uses OpenMP. Both paths compute each
// output element independently, so results agree exactly.
enum class Exec { Seq, Par };

}  // namespace eai
