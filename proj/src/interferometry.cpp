#include "eai/interferometry.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace eai {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Phase convention shared with eig_hermitian: rotate the
// largest-magnitude component onto the positive real axis.
void fix_phase(Eigen::Ref<CVec> v) {
    int imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const cd pivot = v(imax);
    if (std::abs(pivot) > 0.0) {
        v *= std::conj(pivot) / std::abs(pivot);
    }
}

// Leading eigenvectors carrying eigenvalues above rel_tol * lambda_max;
// empty when the matrix has no positive weight.
CMat range_basis(const linalg::EigDecomposition& eig, double rel_tol) {
    const double lmax = eig.values.size() > 0 ? eig.values(0) : 0.0;
    if (!(lmax > 0.0)) {
        return CMat(eig.vectors.rows(), 0);
    }
    int rank = 0;
    while (rank < eig.values.size() && eig.values(rank) > rel_tol * lmax) {
        ++rank;
    }
    return eig.vectors.leftCols(rank);
}

int positive_rank(const linalg::EigDecomposition& eig, double rel_tol) {
    const double lmax = eig.values.size() > 0 ? eig.values(0) : 0.0;
    if (!(lmax > 0.0)) {
        return 0;
    }
    int rank = 0;
    while (rank < eig.values.size() && eig.values(rank) > rel_tol * lmax) {
        ++rank;
    }
    return rank;
}

// Dipole-moment pattern of each field-space mode: with e = M^-1 u,
// p_i = sigma_i (axis_i . e_i) axis_i / (-i omega), columns normalized.
CMat moment_map(const DipoleSystem& system, const ScatteringOperator& op,
                const CMat& modes) {
    const int n = system.size();
    const cd scale = 1.0 / cd(0.0, -op.omega());
    CMat moments(3 * n, modes.cols());
    for (int m = 0; m < modes.cols(); ++m) {
        const CVec e = op.solve(modes.col(m));
        for (int i = 0; i < n; ++i) {
            const cd projected =
                system[i].axis.cast<cd>().dot(e.segment<3>(3 * i));
            moments.block<3, 1>(3 * i, m) =
                scale * sigma_scalar(system[i], op.omega()) * projected *
                system[i].axis.cast<cd>();
        }
        const double norm = moments.col(m).norm();
        if (norm > 0.0) {
            moments.col(m) /= norm;
        }
        fix_phase(moments.col(m));
    }
    return moments;
}

std::vector<std::pair<double, double>> fringe_with_operator(
    const ScatteringOperator& op, const DipoleSystem& system, const CVec& e_a,
    const CVec& e_b, int phase_steps, const NoiseModel& noise,
    unsigned long long sample_base) {
    if (phase_steps < 4) {
        throw config_error("fringe sweep needs at least 4 phase steps");
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(phase_steps);
    for (int k = 0; k < phase_steps; ++k) {
        const double dphi = kTwoPi * k / phase_steps;
        const CVec e_sum = e_a + std::exp(cd(0.0, dphi)) * e_b;
        const double w =
            noise.apply(absorbed_power(op, system, e_sum), sample_base + k);
        out.emplace_back(dphi, w);
    }
    return out;
}

}  // namespace

ProbeSet::ProbeSet(std::vector<Probe> probes) : probes_(std::move(probes)) {
    for (std::size_t i = 0; i < probes_.size(); ++i) {
        probes_[i].green_opts.validate();
        if (!(probes_[i].polarization.norm() > 0.0) ||
            !probes_[i].polarization.allFinite() ||
            !probes_[i].position.allFinite()) {
            throw config_error("probe " + std::to_string(i) +
                               ": invalid position or polarization");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if ((probes_[i].position - probes_[j].position).norm() < 1e-12 &&
                (probes_[i].polarization - probes_[j].polarization).norm() <
                    1e-12) {
                throw config_error("probes " + std::to_string(j) + " and " +
                                   std::to_string(i) + " are identical");
            }
        }
    }
}

ProbeSet ProbeSet::prefix(int s) const {
    if (s < 1 || s > size()) {
        throw config_error("probe prefix size out of range");
    }
    return ProbeSet(std::vector<Probe>(probes_.begin(), probes_.begin() + s));
}

CVec probe_field(const Probe& probe, const DipoleSystem& system, double omega) {
    probe.green_opts.validate();
    if (!(probe.polarization.norm() > 0.0)) {
        throw config_error("probe polarization must be non-zero");
    }
    CVec e(system.dof());
    for (int i = 0; i < system.size(); ++i) {
        if ((system[i].position - probe.position).norm() <= 1e-9) {
            throw config_error("probe coincides with dipole " +
                               std::to_string(i));
        }
        e.segment<3>(3 * i) =
            green_dyadic(system[i].position, probe.position, omega,
                         probe.green_opts) *
            probe.polarization.cast<cd>();
    }
    return e;
}

CMat gp_matrix(const ProbeSet& probes, const DipoleSystem& system,
               double omega) {
    if (probes.size() == 0) {
        throw config_error("probe set is empty");
    }
    CMat gp(system.dof(), probes.size());
    for (int s = 0; s < probes.size(); ++s) {
        gp.col(s) = probe_field(probes[s], system, omega);
    }
    return gp;
}

double NoiseModel::apply(double w, unsigned long long sample_index) const {
    if (!enabled()) {
        return w;
    }
    const std::uint64_t base = splitmix64(seed ^ splitmix64(sample_index));
    const std::uint64_t a = splitmix64(base);
    const std::uint64_t b = splitmix64(base ^ 0x6a09e667f3bcc909ULL);
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    const double gauss = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    return w + (std::abs(w) / snr) * gauss;
}

std::vector<std::pair<double, double>> fringe_sweep(
    const DipoleSystem& system, double omega, const GreenOptions& scatter_opts,
    const Probe& probe_a, const Probe& probe_b, int phase_steps,
    const NoiseModel& noise, unsigned long long sample_base) {
    const ScatteringOperator op(system, omega, scatter_opts, Exec::Seq);
    const CVec e_a = probe_field(probe_a, system, omega);
    const CVec e_b = probe_field(probe_b, system, omega);
    return fringe_with_operator(op, system, e_a, e_b, phase_steps, noise,
                                sample_base);
}

FringeTerms extract_fringe(const std::vector<std::pair<double, double>>& sweep) {
    const int steps = static_cast<int>(sweep.size());
    if (steps < 4) {
        throw config_error("fringe extraction needs at least 4 phase steps");
    }
    cd first = 0.0;
    double dc = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double expected = kTwoPi * k / steps;
        if (std::abs(sweep[k].first - expected) > 1e-9) {
            throw config_error("fringe extraction requires a uniform phase grid");
        }
        dc += sweep[k].second;
        first += sweep[k].second * std::exp(cd(0.0, -sweep[k].first));
    }
    return FringeTerms{dc / steps, first / static_cast<double>(steps)};
}

HMatrix measure_H(const DipoleSystem& system, double omega,
                  const GreenOptions& scatter_opts, const ProbeSet& probes,
                  int phase_steps, const NoiseModel& noise, Exec exec) {
    if (phase_steps < 4) {
        throw config_error("fringe sweep needs at least 4 phase steps");
    }
    const int s = probes.size();
    if (s < 1) {
        throw config_error("probe set is empty");
    }
    const ScatteringOperator op(system, omega, scatter_opts, exec);
    std::vector<CVec> fields(s);
    for (int n = 0; n < s; ++n) {
        fields[n] = probe_field(probes[n], system, omega);
    }

    CMat q = CMat::Zero(s, s);
    // Diagonal entries are plain single-source powers.
    if (exec == Exec::Seq) {
        for (int n = 0; n < s; ++n) {
            q(n, n) = noise.apply(absorbed_power(op, system, fields[n]), n);
        }
    } else {
#pragma omp parallel for schedule(static)
        for (int n = 0; n < s; ++n) {
            q(n, n) = noise.apply(absorbed_power(op, system, fields[n]), n);
        }
    }

    // Off-diagonal entries from pairwise fringes; each pair owns a fixed
    // noise sample range so results are independent of scheduling.
    struct PairJob {
        int n;
        int n_prime;
        unsigned long long base;
    };
    std::vector<PairJob> jobs;
    jobs.reserve(s * (s - 1) / 2);
    unsigned long long next_base = s;
    for (int n = 0; n < s; ++n) {
        for (int np = n + 1; np < s; ++np) {
            jobs.push_back(PairJob{n, np, next_base});
            next_base += phase_steps;
        }
    }
    const int job_count = static_cast<int>(jobs.size());
    if (exec == Exec::Seq) {
        for (int j = 0; j < job_count; ++j) {
            const auto& job = jobs[j];
            const auto sweep =
                fringe_with_operator(op, system, fields[job.n],
                                     fields[job.n_prime], phase_steps, noise,
                                     job.base);
            q(job.n, job.n_prime) = extract_fringe(sweep).h_ab;
        }
    } else {
#pragma omp parallel for schedule(dynamic)
        for (int j = 0; j < job_count; ++j) {
            const auto& job = jobs[j];
            const auto sweep =
                fringe_with_operator(op, system, fields[job.n],
                                     fields[job.n_prime], phase_steps, noise,
                                     job.base);
            q(job.n, job.n_prime) = extract_fringe(sweep).h_ab;
        }
    }
    for (int n = 0; n < s; ++n) {
        for (int np = n + 1; np < s; ++np) {
            q(np, n) = std::conj(q(n, np));
        }
    }

    HMatrix out;
    out.h = 0.5 * (q + q.adjoint());
    out.provenance = HProvenance::FringeExtracted;
    return out;
}

HMatrix direct_H(const DipoleSystem& system, double omega,
                 const GreenOptions& scatter_opts, const ProbeSet& probes) {
    const CMat gp = gp_matrix(probes, system, omega);
    const CMat l = build_L(system, omega, scatter_opts, Exec::Seq);
    const CMat q = gp.adjoint() * l * gp;
    HMatrix out;
    out.h = 0.5 * (q + q.adjoint());
    out.provenance = HProvenance::Direct;
    return out;
}

cd visibility(const HMatrix& H, int n, int n_prime) {
    if (n < 0 || n_prime < 0 || n >= H.h.rows() || n_prime >= H.h.rows()) {
        throw config_error("visibility index out of range");
    }
    const double denom = H.h(n, n).real() + H.h(n_prime, n_prime).real();
    if (!(denom > 0.0)) {
        throw numeric_error("visibility is degenerate: no recorded power");
    }
    return 2.0 * H.h(n, n_prime) / denom;
}

ModeSet recover_modes(const HMatrix& H, const ProbeSet& probes,
                      const DipoleSystem& system, double omega,
                      const GreenOptions& scatter_opts, double rel_tol) {
    if (H.h.rows() != probes.size()) {
        throw config_error("H dimension does not match the probe set");
    }
    const CMat gp = gp_matrix(probes, system, omega);
    const linalg::PinvResult pg = linalg::pinv(gp, rel_tol);
    const CMat l_rec = pg.pinv.adjoint() * H.h * pg.pinv;
    const auto eig = linalg::eig_hermitian(l_rec, true);

    const CMat l_direct = build_L(system, omega, scatter_opts, Exec::Seq);
    const auto eig_direct = linalg::eig_hermitian(l_direct, true);

    const ScatteringOperator op(system, omega, scatter_opts, Exec::Seq);
    ModeSet out;
    out.gamma = eig.values;
    out.modes = eig.vectors;
    out.moments = moment_map(system, op, eig.vectors);
    out.source_vectors = linalg::eig_hermitian(H.h, true).vectors;
    out.numerical_rank = positive_rank(eig, rel_tol);
    out.partial = out.numerical_rank < positive_rank(eig_direct, rel_tol);
    return out;
}

ModeSet direct_modes(const DipoleSystem& system, double omega,
                     const GreenOptions& scatter_opts) {
    const CMat l = build_L(system, omega, scatter_opts, Exec::Seq);
    const auto eig = linalg::eig_hermitian(l, true);
    const ScatteringOperator op(system, omega, scatter_opts, Exec::Seq);
    ModeSet out;
    out.gamma = eig.values;
    out.modes = eig.vectors;
    out.moments = moment_map(system, op, eig.vectors);
    out.source_vectors = CMat(0, 0);
    out.numerical_rank = positive_rank(eig, 1e-10);
    out.partial = false;
    return out;
}

std::vector<std::pair<int, double>> convergence_study(
    const DipoleSystem& system, double omega, const GreenOptions& scatter_opts,
    const ProbeSet& generator, int max_probes, double rel_tol, Exec exec) {
    if (max_probes < 2 || max_probes > generator.size()) {
        throw config_error("max_probes must lie in [2, generator size]");
    }
    const CMat l_direct = build_L(system, omega, scatter_opts, Exec::Seq);
    const CMat u_direct =
        range_basis(linalg::eig_hermitian(l_direct, true), rel_tol);

    const int runs = max_probes - 1;
    std::vector<std::pair<int, double>> out(runs);
    const auto run_one = [&](int idx) {
        const int s = idx + 2;
        const ProbeSet subset = generator.prefix(s);
        const HMatrix h = direct_H(system, omega, scatter_opts, subset);
        const CMat gp = gp_matrix(subset, system, omega);
        const linalg::PinvResult pg = linalg::pinv(gp, rel_tol);
        const CMat l_rec = pg.pinv.adjoint() * h.h * pg.pinv;
        const CMat u_rec =
            range_basis(linalg::eig_hermitian(l_rec, true), rel_tol);
        out[idx] = {s, linalg::subspace_residual(u_rec, u_direct)};
    };
    if (exec == Exec::Seq) {
        for (int idx = 0; idx < runs; ++idx) {
            run_one(idx);
        }
    } else {
#pragma omp parallel for schedule(dynamic)
        for (int idx = 0; idx < runs; ++idx) {
            run_one(idx);
        }
    }
    return out;
}

}  // namespace eai
