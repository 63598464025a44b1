#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "heraldsim/homodyne.hpp"

namespace heraldsim {

struct WindowVariance {
    int window_index = 0;
    double variance = 0.0;
    int count = 0;
    double sigma_error = 0.0;  // variance * sqrt(2 / count)
};

// Variance law Delta^2 Q_phi = A + B cos(2 phi); B = 0 flags a
// phase-insensitive dataset. phase_offset is the reference phase of the
// variance maximum (0 by construction of the assignment).
struct VarianceFit {
    double A = 0.0;
    double B = 0.0;
    double phase_offset = 0.0;
    bool phase_sensitive() const { return B > 0.0; }
};

struct PhasedSample {
    double q = 0.0;
    double phi = 0.0;
};

struct ReconstructionSettings {
    FockCutoff cutoff{10};
    int max_iterations = 2000;
    double log_likelihood_tolerance = 1e-10;
    int phase_bins = 12;
    int q_bins = 100;

    void validate() const {
        if (max_iterations <= 0) throw config_error("max_iterations: must be positive");
        if (!(log_likelihood_tolerance > 0.0))
            throw config_error("loglik_tolerance: must be positive");
        if (phase_bins <= 0) throw config_error("phase_bins: must be positive");
        if (q_bins <= 0) throw config_error("q_bins: must be positive");
    }
};

struct ReconstructedState {
    DensityMatrix rho;
    int iterations_used = 0;
    std::vector<double> log_likelihood_trace;  // per-sample units, nondecreasing
    int skipped_bins = 0;
    double final_log_likelihood() const {
        return log_likelihood_trace.empty() ? 0.0 : log_likelihood_trace.back();
    }
};

// Unbiased per-window sample variance with the sigma_i sqrt(2/N_i) error bar.
std::vector<WindowVariance> window_variances(const QuadratureDataset& dataset);

// A, B from robust 2%/98% quantiles of the window-variance distribution;
// returns B = 0 when the spread is consistent with the per-window errors.
VarianceFit fit_variance_law(const std::vector<WindowVariance>& variances);

// phi_w = arccos(clamp((v_w - A)/B, -1, 1)) / 2 in [0, pi/2]; optional
// nearest-continuation unfolding to [0, pi).
std::vector<PhasedSample> assign_phases(const QuadratureDataset& dataset, const VarianceFit& fit,
                                        bool unfold = false);

// Phase-average path for phase-insensitive states: deterministic uniform grid
// phi_w = (w + 1/2) pi / W.
std::vector<PhasedSample> assign_phases_uniform(const QuadratureDataset& dataset);

// Rank-one measurement operator Pi(q, phi) with entries psi_n psi_m
// e^{i(m-n)phi}, oriented so that Tr[Pi rho] = pr(q|phi) for any rho.
CMatrix quadrature_projector(double q, double phi, FockCutoff cutoff);

// Iterative maximum-likelihood reconstruction: rho <- N[R(rho) rho R(rho)]
// from rho0 = I/D over (q, phi)-binned samples. The optional observer sees
// the state after every iteration.
ReconstructedState maxlik_reconstruct(std::span<const PhasedSample> samples,
                                      const ReconstructionSettings& settings,
                                      const std::function<void(const CMatrix&)>& observer = {});

// Pre-binned entry point: one projector per (q, phi) cell with an arbitrary
// nonnegative weight (e.g. analytic frequencies).
struct BinnedSample {
    double q = 0.0;
    double phi = 0.0;
    double weight = 0.0;
};
ReconstructedState maxlik_reconstruct_binned(std::span<const BinnedSample> bins,
                                             const ReconstructionSettings& settings,
                                             const std::function<void(const CMatrix&)>& observer = {});

// Text persistence: key=value header (cutoff, iterations, final_loglik), then
// D lines of D comma-separated re+imj entries.
void write_reconstruction(const ReconstructedState& state, const std::filesystem::path& path);
DensityMatrix read_reconstruction(const std::filesystem::path& path);

} // namespace heraldsim
