#pragma once

#include <Eigen/Dense>
#include <vector>

#include "eai/common.hpp"

namespace eai {

using Vec3 = Eigen::Vector3d;

// One bound-charge Lorentz oscillator restricted to oscillate along a
// fixed unit axis. omega0 and gamma are stored in rad/s; alpha is the
// electrostatic polarizability alpha_e/eps0 in mm^3, which fixes
// q^2/m = alpha_e * omega0^2 in internal units.
struct Dipole {
    Vec3 position;   // mm
    Vec3 axis;       // unit current/moment direction
    double omega0;   // rad/s
    double gamma;    // rad/s
    double alpha;    // mm^3

    static Dipole make(const Vec3& pos, const Vec3& axis_raw, double f0_ghz,
                       double gamma_ghz, double alpha_e);
};

class DipoleSystem {
  public:
    explicit DipoleSystem(std::vector<Dipole> dipoles);

    int size() const { return static_cast<int>(dipoles_.size()); }
    int dof() const { return 3 * size(); }
    const Dipole& operator[](int i) const { return dipoles_[i]; }
    const std::vector<Dipole>& dipoles() const { return dipoles_; }

  private:
    std::vector<Dipole> dipoles_;
};

// alpha_e from material parameters, Clausius-Mossotti form
// [(eps_r - 1) / (1 + n (eps_r - 1))] * V. Throws config_error when the
// shape factor puts the denominator at a depolarization resonance.
cd clausius_mossotti(cd epsilon_r, double shape_n, double volume_mm3);

// Generators used by the scenario library. Chains run along x centred
// on the origin; rings put the first vertex at angle 90 degrees
// (the paper's reference convention), with `side` the vertex-to-vertex
// edge length. All dipoles are z-polarized.
DipoleSystem make_chain(int n, double spacing_mm, double f0_ghz,
                        double gamma_ghz, double alpha_e);
DipoleSystem make_ring(int n, double side_mm, double f0_ghz,
                       double gamma_ghz, double alpha_e);

}  // namespace eai
