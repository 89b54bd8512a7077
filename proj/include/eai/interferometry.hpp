#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "eai/assembly.hpp"

namespace eai {

// Point source: position, unit current-moment direction, and the dyadic
// terms it radiates with (near-field / far-field / full probe operation).
struct Probe {
    Vec3 position;
    Vec3 polarization;
    GreenOptions green_opts{};
};

// Ordered probe list; duplicates (same position and polarization) are
// rejected. S >= 2 is required for fringe work but single-probe sets
// are valid for plain power measurements.
class ProbeSet {
  public:
    ProbeSet() = default;
    explicit ProbeSet(std::vector<Probe> probes);

    int size() const { return static_cast<int>(probes_.size()); }
    const Probe& operator[](int i) const { return probes_[i]; }
    const std::vector<Probe>& probes() const { return probes_; }
    ProbeSet prefix(int s) const;

  private:
    std::vector<Probe> probes_;
};

// Incident field at every dipole from a unit current-moment at the
// probe: one column of G^P. Throws when the probe coincides with a
// dipole position.
CVec probe_field(const Probe& probe, const DipoleSystem& system, double omega);

// Full 3N x S probe matrix G^P.
CMat gp_matrix(const ProbeSet& probes, const DipoleSystem& system, double omega);

// Optional additive Gaussian measurement noise on every recorded power
// sample, with standard deviation sample/snr. Deterministic: the draw
// for sample k depends only on (seed, k), independent of threading.
struct NoiseModel {
    double snr = 0.0;  // 0 disables
    unsigned long long seed = 0;

    bool enabled() const { return snr > 0.0; }
    double apply(double w, unsigned long long sample_index) const;
};

enum class HProvenance { Direct, FringeExtracted };

struct HMatrix {
    CMat h;  // S x S Hermitian PSD over probe indices
    HProvenance provenance = HProvenance::Direct;
};

// Rotates the differential phase of probe b against probe a over a
// uniform grid of `phase_steps` points on [0, 2pi) and records the total
// absorbed power of the summed incident field by full forward solves.
std::vector<std::pair<double, double>> fringe_sweep(
    const DipoleSystem& system, double omega, const GreenOptions& scatter_opts,
    const Probe& probe_a, const Probe& probe_b, int phase_steps = 16,
    const NoiseModel& noise = {}, unsigned long long sample_base = 0);

// Discrete Fourier projection of a uniform fringe:
// first harmonic gives H_ab, the DC term gives H_aa + H_bb.
struct FringeTerms {
    double w_a_plus_b;
    cd h_ab;
};
FringeTerms extract_fringe(const std::vector<std::pair<double, double>>& sweep);

// Populates H the way an experiment would: diagonal from single-source
// powers, off-diagonal from pairwise fringes, conjugate-filled and
// Hermitian-symmetrized.
HMatrix measure_H(const DipoleSystem& system, double omega,
                  const GreenOptions& scatter_opts, const ProbeSet& probes,
                  int phase_steps = 16, const NoiseModel& noise = {},
                  Exec exec = Exec::Par);

// Reference H = G^P^H L G^P evaluated directly.
HMatrix direct_H(const DipoleSystem& system, double omega,
                 const GreenOptions& scatter_opts, const ProbeSet& probes);

// Complex fringe visibility gamma_nn' = 2 H_nn' / (H_nn + H_n'n').
cd visibility(const HMatrix& H, int n, int n_prime);

// Recovered dynamical modes. gamma: responsivities of the deconvolved
// response matrix, descending. source_vectors: eigenvectors of H over
// probe space. modes: field-space eigenvectors u_m of the recovered L.
// moments: dipole-moment patterns p_m = (1/-i omega) Sigma M^-1 u_m,
// unit-normalized with the linalg phase convention.
struct ModeSet {
    RVec gamma;
    CMat source_vectors;
    CMat modes;
    CMat moments;
    int numerical_rank = 0;
    bool partial = false;  // rank fell short of the system's mode count
};

// Deconvolves the probe patterns: L_rec = pinv(G^P^H) H pinv(G^P) with
// rel_tol truncation, then diagonalizes. Marks the result partial when
// the recovered rank is below the rank of the directly computed L.
ModeSet recover_modes(const HMatrix& H, const ProbeSet& probes,
                      const DipoleSystem& system, double omega,
                      const GreenOptions& scatter_opts, double rel_tol = 1e-10);

// Direct counterpart (diagonalize L itself); same ModeSet layout.
ModeSet direct_modes(const DipoleSystem& system, double omega,
                     const GreenOptions& scatter_opts);

// Subspace error of recovered vs direct modes for S = 2..max_probes
// probes drawn in order from `generator`. Error is the sine of the
// largest principal angle of the direct mode span against the recovered
// span (1 while directions are missing, machine-level at convergence).
std::vector<std::pair<int, double>> convergence_study(
    const DipoleSystem& system, double omega, const GreenOptions& scatter_opts,
    const ProbeSet& generator, int max_probes, double rel_tol = 1e-10,
    Exec exec = Exec::Par);

}  // namespace eai
