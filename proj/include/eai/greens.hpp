#pragma once

#include <Eigen/Dense>

#include "eai/common.hpp"
#include "eai/model.hpp"

namespace eai {

using Dyadic3 = Eigen::Matrix3cd;

// Prefactor selection: OmegaMu0 is the field of a physical unit
// current-moment (i omega mu0 with mu0 = 1); KSquared substitutes k^2,
// the form entering the normalized scattering operator. The two differ
// by the real scale omega/(c^2 k^2) at fixed frequency.
enum class Prefactor { OmegaMu0, KSquared };

// Term toggles for the dyadic, applied both to inter-dipole scattering
// and to source illumination; at least one of near/intermediate/far
// must stay enabled.
struct GreenOptions {
    bool near = true;
    bool intermediate = true;
    bool far = true;
    Prefactor prefactor = Prefactor::OmegaMu0;

    static GreenOptions near_only() { return {true, false, false, Prefactor::OmegaMu0}; }
    static GreenOptions far_only() { return {false, false, true, Prefactor::OmegaMu0}; }
    void validate() const;
};

enum class FieldRegime { Near, Intermediate, Far };

// Free-space dyadic between source and observation point, as the sum of
// the enabled terms
//   NF = -i P (e^{ikR}/4 pi R) (1/k^2R^2) [I - 3 RR/R^2]
//   IF = +i P (e^{ikR}/4 pi R) (i/kR)    [I - 3 RR/R^2]
//   FF = +i P (e^{ikR}/4 pi R)           [I -   RR/R^2]
// with P the selected prefactor. Throws numeric_error at R = 0; the
// self-term is defined as zero in assembly code, never here.
Dyadic3 green_dyadic(const Vec3& r_obs, const Vec3& r_src, double omega,
                     const GreenOptions& opts);

// Diagnostic classification only; never gates physics. Near: R < lambda,
// Intermediate: lambda <= R < 10 lambda, Far otherwise.
FieldRegime kR_regime(const Vec3& r_obs, const Vec3& r_src, double omega);

}  // namespace eai
