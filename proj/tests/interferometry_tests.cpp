#include <cmath>
#include <numbers>

#include "doctest.h"
#include "eai/interferometry.hpp"
#include "oracles.hpp"

using namespace eai;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

DipoleSystem two_dipole() { return make_chain(2, 0.1, 300.0, 20.0, 0.005); }

DipoleSystem five_chain() { return make_chain(5, 0.1, 300.0, 20.0, 0.005); }

// Probe ladder used by the five-chain recovery experiments: z-polarized
// near-field sources along y = 5 mm.
ProbeSet chain_probes() {
    std::vector<Probe> probes;
    for (double x : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 0.5, 2.5}) {
        probes.push_back(
            Probe{Vec3(x, 5.0, 0.0), Vec3(0, 0, 1), GreenOptions::near_only()});
    }
    return ProbeSet(std::move(probes));
}

ProbeSet ring_of_probes(int s, double radius, double offset_deg = 0.0) {
    std::vector<Probe> probes;
    for (int i = 0; i < s; ++i) {
        const double a = (offset_deg + 360.0 * i / s) * std::numbers::pi / 180.0;
        probes.push_back(Probe{
            Vec3(radius * std::cos(a), radius * std::sin(a), 0.0),
            Vec3(0, 0, 1), {}});
    }
    return ProbeSet(std::move(probes));
}

double rel_frob(const CMat& a, const CMat& b) {
    return (a - b).norm() / b.norm();
}

}  // namespace

TEST_SUITE("interferometry") {

TEST_CASE("probe_field: transverse projector kills the on-axis component") {
    // A z-polarized far-field probe straight above a dipole produces no
    // z-field there.
    const DipoleSystem sys{{Dipole::make(Vec3(0, 0, 0), Vec3(0, 0, 1), 300.0,
                                         20.0, 0.005)}};
    const Probe probe{Vec3(0, 0, 5.0), Vec3(0, 0, 1), GreenOptions::far_only()};
    const CVec e = probe_field(probe, sys, units::omega_from_ghz(300.0));
    CHECK(std::abs(e(2)) == 0.0);
}

TEST_CASE("probe_field: linear in the current moment") {
    const DipoleSystem sys = two_dipole();
    const double omega = units::omega_from_ghz(260.0);
    const Probe unit{Vec3(3, 4, 0), Vec3(0, 0, 1), {}};
    const Probe twice{Vec3(3, 4, 0), Vec3(0, 0, 2), {}};
    const CVec e1 = probe_field(unit, sys, omega);
    const CVec e2 = probe_field(twice, sys, omega);
    CHECK((e2 - 2.0 * e1).norm() <= 1e-15 * e2.norm());
}

TEST_CASE("probe_field matches the finite-difference dyadic oracle") {
    const DipoleSystem sys = five_chain();
    const double omega = units::omega_from_ghz(280.0);
    const Probe probe{Vec3(1.0, 5.0, 0.0), Vec3(0, 0, 1), {}};
    const CVec e = probe_field(probe, sys, omega);
    for (int i = 0; i < sys.size(); ++i) {
        const Eigen::Vector3cd expected =
            oracle::fd_green(sys[i].position, probe.position, omega,
                             Prefactor::OmegaMu0) *
            probe.polarization.cast<cd>();
        CAPTURE(i);
        CHECK((e.segment<3>(3 * i) - expected).norm() < 1e-5 * expected.norm());
    }
}

TEST_CASE("probe_field rejects degenerate probes") {
    const DipoleSystem sys = two_dipole();
    const double omega = units::omega_from_ghz(300.0);
    CHECK_THROWS_AS(
        probe_field(Probe{sys[0].position, Vec3(0, 0, 1), {}}, sys, omega),
        config_error);
    CHECK_THROWS_AS(
        probe_field(Probe{Vec3(5, 5, 0), Vec3(0, 0, 0), {}}, sys, omega),
        config_error);
}

TEST_CASE("ProbeSet rejects duplicates, keeps distinguishable probes") {
    const Probe a{Vec3(1, 0, 0), Vec3(0, 0, 1), {}};
    const Probe b{Vec3(1, 0, 0), Vec3(0, 1, 0), {}};
    CHECK_THROWS_AS(ProbeSet({a, a}), config_error);
    CHECK(ProbeSet({a, b}).size() == 2);  // same spot, different moment

    const ProbeSet set = chain_probes();
    CHECK(set.prefix(3).size() == 3);
    CHECK_THROWS_AS(set.prefix(0), config_error);
    CHECK_THROWS_AS(set.prefix(9), config_error);
}

TEST_CASE("fringe_sweep: identical probes interfere perfectly") {
    const DipoleSystem sys = two_dipole();
    const double omega = units::omega_from_ghz(240.0);
    const Probe p{Vec3(2, 6, 0), Vec3(0, 0, 1), {}};
    const double w_single =
        absorbed_power(sys, omega, {}, probe_field(p, sys, omega));

    const auto sweep = fringe_sweep(sys, omega, {}, p, p, 16);
    REQUIRE(sweep.size() == 16);
    CHECK(sweep[0].first == 0.0);
    CHECK(sweep[0].second == doctest::Approx(4.0 * w_single).epsilon(1e-12));
    // Index 8 sits exactly at the pi null.
    CHECK(sweep[8].second < 1e-12 * sweep[0].second);
    for (const auto& [dphi, w] : sweep) {
        CHECK(w >= -1e-15 * sweep[0].second);
    }
}

TEST_CASE("fringe_sweep: mean over the phase grid is the incoherent sum") {
    const DipoleSystem sys = two_dipole();
    const double omega = units::omega_from_ghz(300.0);
    const Probe a{Vec3(0, 5, 0), Vec3(0, 0, 1), {}};
    const Probe b{Vec3(3, 4, 0), Vec3(0, 0, 1), {}};
    const double w_a = absorbed_power(sys, omega, {}, probe_field(a, sys, omega));
    const double w_b = absorbed_power(sys, omega, {}, probe_field(b, sys, omega));

    const auto sweep = fringe_sweep(sys, omega, {}, a, b, 16);
    double mean = 0.0;
    for (const auto& [dphi, w] : sweep) {
        mean += w;
    }
    mean /= static_cast<double>(sweep.size());
    CHECK(mean == doctest::Approx(w_a + w_b).epsilon(1e-10));

    CHECK_THROWS_AS(fringe_sweep(sys, omega, {}, a, b, 3), config_error);
}

TEST_CASE("extract_fringe inverts a synthetic cosine") {
    const auto synth = [](int steps) {
        std::vector<std::pair<double, double>> sweep;
        for (int k = 0; k < steps; ++k) {
            const double dphi = kTwoPi * k / steps;
            sweep.emplace_back(dphi,
                               3.0 + 2.0 * std::cos(dphi + std::numbers::pi / 4));
        }
        return sweep;
    };

    const FringeTerms t16 = extract_fringe(synth(16));
    const cd expected = std::polar(1.0, std::numbers::pi / 4);
    CHECK(t16.w_a_plus_b == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(t16.h_ab - expected) < 1e-12);

    // Four points already determine a pure first harmonic.
    const FringeTerms t4 = extract_fringe(synth(4));
    CHECK(std::abs(t4.h_ab - t16.h_ab) < 1e-12);
    CHECK(t4.w_a_plus_b == doctest::Approx(t16.w_a_plus_b).epsilon(1e-12));

    std::vector<std::pair<double, double>> flat;
    for (int k = 0; k < 8; ++k) {
        flat.emplace_back(kTwoPi * k / 8, 5.0);
    }
    CHECK(std::abs(extract_fringe(flat).h_ab) < 1e-15);

    std::vector<std::pair<double, double>> crooked = synth(8);
    crooked[3].first += 1e-6;
    CHECK_THROWS_AS(extract_fringe(crooked), config_error);
    CHECK_THROWS_AS(extract_fringe(synth(3)), config_error);
}

TEST_CASE("extracted pair term equals the direct quadratic form") {
    const DipoleSystem sys = two_dipole();
    const double omega = units::omega_from_ghz(240.0);
    const Probe a{Vec3(0, 5, 0), Vec3(0, 0, 1), {}};
    const Probe b{Vec3(3, 4, 0), Vec3(0, 0, 1), {}};
    const cd h_ab = extract_fringe(fringe_sweep(sys, omega, {}, a, b)).h_ab;
    const HMatrix direct = direct_H(sys, omega, {}, ProbeSet({a, b}));
    CHECK(std::abs(h_ab - direct.h(0, 1)) < 1e-10 * std::abs(direct.h(0, 1)));
}

TEST_CASE("measure_H reproduces the direct matrix") {
    const DipoleSystem sys = two_dipole();
    const double omega = units::omega_from_ghz(240.0);
    const ProbeSet probes = ring_of_probes(4, 6.0);

    const HMatrix fringes = measure_H(sys, omega, {}, probes, 16, {}, Exec::Seq);
    const HMatrix direct = direct_H(sys, omega, {}, probes);
    CHECK(fringes.provenance == HProvenance::FringeExtracted);
    CHECK(direct.provenance == HProvenance::Direct);
    CHECK(rel_frob(fringes.h, direct.h) < 1e-9);

    for (const HMatrix* h : {&fringes, &direct}) {
        CHECK((h->h - h->h.adjoint()).norm() <= 1e-10 * h->h.norm());
        for (int n = 0; n < 4; ++n) {
            CHECK(h->h(n, n).imag() == 0.0);
            CHECK(h->h(n, n).real() >= 0.0);
            for (int np = 0; np < 4; ++np) {
                CHECK(std::abs(h->h(n, np)) <=
                      std::sqrt(h->h(n, n).real() * h->h(np, np).real()) *
                          (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("measure_H: single probe reduces to a power reading") {
    const DipoleSystem sys = two_dipole();
    const double omega = units::omega_from_ghz(300.0);
    const Probe p{Vec3(0, 5, 0), Vec3(0, 0, 1), {}};
    const HMatrix h = measure_H(sys, omega, {}, ProbeSet({p}), 16, {}, Exec::Seq);
    REQUIRE(h.h.rows() == 1);
    const double w = absorbed_power(sys, omega, {}, probe_field(p, sys, omega));
    CHECK(h.h(0, 0).real() == doctest::Approx(w).epsilon(1e-14));
    CHECK_THROWS_AS(measure_H(sys, omega, {}, ProbeSet{}, 16, {}, Exec::Seq),
                    config_error);
    CHECK_THROWS_AS(measure_H(sys, omega, {}, ProbeSet({p}), 2, {}, Exec::Seq),
                    config_error);
}

TEST_CASE("measure_H: permuting probes permutes rows and columns") {
    const DipoleSystem sys = two_dipole();
    const double omega = units::omega_from_ghz(300.0);
    std::vector<Probe> fwd;
    for (double x : {0.0, 2.0, -3.0}) {
        fwd.push_back(Probe{Vec3(x, 5, 0), Vec3(0, 0, 1), {}});
    }
    std::vector<Probe> rev(fwd.rbegin(), fwd.rend());
    const CMat h1 =
        measure_H(sys, omega, {}, ProbeSet(fwd), 16, {}, Exec::Seq).h;
    const CMat h2 =
        measure_H(sys, omega, {}, ProbeSet(rev), 16, {}, Exec::Seq).h;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(std::abs(h2(i, j) - h1(2 - i, 2 - j)) <= 1e-12 * h1.norm());
        }
    }
}

TEST_CASE("visibility: normalization and bounds") {
    const DipoleSystem sys = two_dipole();
    const double omega = units::omega_from_ghz(240.0);
    const HMatrix h = direct_H(sys, omega, {}, ring_of_probes(5, 6.0));
    for (int n = 0; n < 5; ++n) {
        CHECK(visibility(h, n, n) == cd(1.0));
        for (int np = 0; np < 5; ++np) {
            CHECK(std::abs(visibility(h, n, np)) <= 1.0 + 1e-12);
        }
    }
    CHECK_THROWS_AS(visibility(h, 0, 5), config_error);
    CHECK_THROWS_AS(visibility(h, -1, 0), config_error);

    HMatrix dead;
    dead.h = CMat::Zero(2, 2);
    CHECK_THROWS_AS(visibility(dead, 0, 1), numeric_error);
}

TEST_CASE("noise model: deterministic per seed, off by default") {
    const NoiseModel off;
    CHECK(!off.enabled());
    CHECK(off.apply(2.5, 17) == 2.5);

    const NoiseModel n1{100.0, 42};
    const NoiseModel n2{100.0, 43};
    CHECK(n1.apply(1.0, 5) == n1.apply(1.0, 5));
    CHECK(n1.apply(1.0, 5) != n1.apply(1.0, 6));
    CHECK(n1.apply(1.0, 5) != n2.apply(1.0, 5));

    const DipoleSystem sys = two_dipole();
    const double omega = units::omega_from_ghz(300.0);
    const ProbeSet probes = ring_of_probes(3, 6.0);
    const CMat a =
        measure_H(sys, omega, {}, probes, 16, NoiseModel{50.0, 7}, Exec::Seq).h;
    const CMat b =
        measure_H(sys, omega, {}, probes, 16, NoiseModel{50.0, 7}, Exec::Seq).h;
    const CMat c =
        measure_H(sys, omega, {}, probes, 16, NoiseModel{50.0, 8}, Exec::Seq).h;
    CHECK((a - b).norm() == 0.0);
    CHECK((a - c).norm() > 0.0);
}

TEST_CASE("recover_modes: two-dipole recovery is exact") {
    const DipoleSystem sys = two_dipole();
    const double omega = units::omega_from_ghz(240.0);
    const ProbeSet probes = ring_of_probes(6, 6.0, 10.0);
    const HMatrix h = measure_H(sys, omega, {}, probes, 16, {}, Exec::Seq);

    const ModeSet rec = recover_modes(h, probes, sys, omega, {});
    const ModeSet direct = direct_modes(sys, omega, {});
    REQUIRE(rec.numerical_rank == 2);
    CHECK(!rec.partial);
    for (int m = 0; m < 2; ++m) {
        CHECK(std::abs(rec.gamma(m) - direct.gamma(m)) <
              1e-8 * direct.gamma(0));
    }
    const double angle = linalg::max_principal_angle(
        direct.modes.leftCols(2), rec.modes.leftCols(2));
    CHECK(angle < 1e-8);

    // Dipole-moment patterns: unit norm, dominant entry positive real.
    for (int m = 0; m < 2; ++m) {
        CHECK(rec.moments.col(m).norm() == doctest::Approx(1.0).epsilon(1e-12));
        int imax = 0;
        rec.moments.col(m).cwiseAbs().maxCoeff(&imax);
        CHECK(rec.moments(imax, m).real() > 0.0);
        CHECK(std::abs(rec.moments(imax, m).imag()) < 1e-12);
    }

    HMatrix wrong;
    wrong.h = CMat::Identity(3, 3);
    CHECK_THROWS_AS(recover_modes(wrong, probes, sys, omega, {}), config_error);
}

TEST_CASE("recover_modes: four probes cannot resolve the five-chain") {
    const DipoleSystem sys = five_chain();
    const double omega = units::omega_from_ghz(280.0);
    const ProbeSet gen = chain_probes();

    const ProbeSet five = gen.prefix(5);
    const HMatrix h5 = direct_H(sys, omega, {}, five);
    const ModeSet full = recover_modes(h5, five, sys, omega, {});
    CHECK(full.numerical_rank == 5);
    CHECK(!full.partial);

    const ProbeSet four = gen.prefix(4);
    const HMatrix h4 = direct_H(sys, omega, {}, four);
    const ModeSet partial = recover_modes(h4, four, sys, omega, {});
    CHECK(partial.numerical_rank == 4);
    CHECK(partial.partial);
}

TEST_CASE("convergence_study: five-chain plateaus at five probes") {
    const DipoleSystem sys = five_chain();
    const double omega = units::omega_from_ghz(280.0);
    const auto curve =
        convergence_study(sys, omega, {}, chain_probes(), 8, 1e-10, Exec::Seq);
    REQUIRE(curve.size() == 7);  // S = 2..8
    for (const auto& [s, err] : curve) {
        if (s < 5) {
            CHECK(err > 0.5);  // whole directions still missing
        } else {
            CHECK(err < 1e-9);
        }
    }
    // No regression after the plateau.
    for (std::size_t i = 4; i < curve.size(); ++i) {
        CHECK(curve[i].second <= curve[3].second + 1e-9);
    }
    CHECK_THROWS_AS(
        convergence_study(sys, omega, {}, chain_probes(), 1, 1e-10, Exec::Seq),
        config_error);
    CHECK_THROWS_AS(
        convergence_study(sys, omega, {}, chain_probes(), 9, 1e-10, Exec::Seq),
        config_error);
}

TEST_CASE("convergence_study: single dipole is solved by any two probes") {
    const DipoleSystem sys{{Dipole::make(Vec3(0, 0, 0), Vec3(0, 0, 1), 300.0,
                                         20.0, 0.005)}};
    const auto curve = convergence_study(sys, units::omega_from_ghz(300.0), {},
                                         ring_of_probes(3, 5.0), 3, 1e-10,
                                         Exec::Seq);
    for (const auto& [s, err] : curve) {
        CHECK(err < 1e-9);
    }
}

}  // TEST_SUITE
