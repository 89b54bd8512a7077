#include "eai/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace eai {

namespace {

void check_dipole(const Dipole& d, int index) {
    const std::string tag = "dipole " + std::to_string(index) + ": ";
    if (!d.position.allFinite() || !d.axis.allFinite()) {
        throw config_error(tag + "non-finite position or axis");
    }
    if (std::abs(d.axis.norm() - 1.0) > 1e-12) {
        throw config_error(tag + "axis is not a unit vector");
    }
    if (!(d.omega0 > 0.0) || !(d.gamma > 0.0) || !(d.alpha > 0.0)) {
        throw config_error(tag + "omega0, gamma and alpha_e must be positive");
    }
}

}  // namespace

Dipole Dipole::make(const Vec3& pos, const Vec3& axis_raw, double f0_ghz,
                    double gamma_ghz, double alpha_e) {
    const double norm = axis_raw.norm();
    if (!(norm > 0.0)) {
        throw config_error("dipole axis must be non-zero");
    }
    return Dipole{pos, axis_raw / norm, units::omega_from_ghz(f0_ghz),
                  units::omega_from_ghz(gamma_ghz), alpha_e};
}

DipoleSystem::DipoleSystem(std::vector<Dipole> dipoles)
    : dipoles_(std::move(dipoles)) {
    for (int i = 0; i < size(); ++i) {
        check_dipole(dipoles_[i], i);
        for (int j = 0; j < i; ++j) {
            if ((dipoles_[i].position - dipoles_[j].position).norm() <= 1e-9) {
                throw config_error("dipoles " + std::to_string(j) + " and " +
                                   std::to_string(i) + " coincide");
            }
        }
    }
}

cd clausius_mossotti(cd epsilon_r, double shape_n, double volume_mm3) {
    if (!(shape_n > 0.0) || !(shape_n < 1.0)) {
        throw config_error("shape factor must lie in (0, 1)");
    }
    if (!(volume_mm3 > 0.0)) {
        throw config_error("volume must be positive");
    }
    const cd denom = 1.0 + shape_n * (epsilon_r - 1.0);
    if (std::abs(denom) < 1e-12) {
        throw config_error("shape factor sits at a depolarization resonance");
    }
    return (epsilon_r - 1.0) / denom * volume_mm3;
}

DipoleSystem make_chain(int n, double spacing_mm, double f0_ghz,
                        double gamma_ghz, double alpha_e) {
    if (n < 1) {
        throw config_error("chain needs at least one dipole");
    }
    if (n > 1 && !(spacing_mm > 0.0)) {
        throw config_error("chain spacing must be positive");
    }
    std::vector<Dipole> dipoles;
    dipoles.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double x = (i - 0.5 * (n - 1)) * spacing_mm;
        dipoles.push_back(Dipole::make(Vec3(x, 0.0, 0.0), Vec3(0.0, 0.0, 1.0),
                                       f0_ghz, gamma_ghz, alpha_e));
    }
    return DipoleSystem(std::move(dipoles));
}

DipoleSystem make_ring(int n, double side_mm, double f0_ghz, double gamma_ghz,
                       double alpha_e) {
    if (n < 3) {
        throw config_error("ring needs at least three dipoles");
    }
    if (!(side_mm > 0.0)) {
        throw config_error("ring side must be positive");
    }
    const double circumradius = side_mm / (2.0 * std::sin(std::numbers::pi / n));
    std::vector<Dipole> dipoles;
    dipoles.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double angle =
            std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * i / n;
        dipoles.push_back(Dipole::make(
            Vec3(circumradius * std::cos(angle), circumradius * std::sin(angle),
                 0.0),
            Vec3(0.0, 0.0, 1.0), f0_ghz, gamma_ghz, alpha_e));
    }
    return DipoleSystem(std::move(dipoles));
}

}  // namespace eai
