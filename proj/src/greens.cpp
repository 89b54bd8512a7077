#include "eai/greens.hpp"

#include <cmath>
#include <numbers>

namespace eai {

void GreenOptions::validate() const {
    if (!near && !intermediate && !far) {
        throw config_error("at least one dyadic term must be enabled");
    }
}

Dyadic3 green_dyadic(const Vec3& r_obs, const Vec3& r_src, double omega,
                     const GreenOptions& opts) {
    opts.validate();
    if (!(omega > 0.0)) {
        throw numeric_error("green_dyadic requires omega > 0");
    }
    const Vec3 rvec = r_obs - r_src;
    const double r = rvec.norm();
    if (r <= 1e-12) {
        throw numeric_error("green_dyadic evaluated at zero separation");
    }
    const double k = units::wavenumber(omega);
    const double kr = k * r;
    const Vec3 rhat = rvec / r;

    const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d rr = rhat * rhat.transpose();
    const Eigen::Matrix3d transverse = id - rr;     // I - RR
    const Eigen::Matrix3d longitudinal = id - 3.0 * rr;

    Dyadic3 terms = Dyadic3::Zero();
    if (opts.far) {
        terms += transverse.cast<cd>();
    }
    if (opts.intermediate) {
        terms += (cd(0.0, 1.0) / kr) * longitudinal.cast<cd>();
    }
    if (opts.near) {
        terms += cd(-1.0 / (kr * kr), 0.0) * longitudinal.cast<cd>();
    }

    const double prefactor =
        opts.prefactor == Prefactor::KSquared ? k * k : omega;  // mu0 = 1
    const cd spherical =
        std::exp(cd(0.0, kr)) / (4.0 * std::numbers::pi * r);
    return cd(0.0, 1.0) * prefactor * spherical * terms;
}

FieldRegime kR_regime(const Vec3& r_obs, const Vec3& r_src, double omega) {
    const double r = (r_obs - r_src).norm();
    if (!(omega > 0.0) || r <= 0.0) {
        throw numeric_error("kR_regime requires omega > 0 and separation > 0");
    }
    const double lambda = 2.0 * std::numbers::pi / units::wavenumber(omega);
    if (r < lambda) {
        return FieldRegime::Near;
    }
    if (r < 10.0 * lambda) {
        return FieldRegime::Intermediate;
    }
    return FieldRegime::Far;
}

}  // namespace eai
