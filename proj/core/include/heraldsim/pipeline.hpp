#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "heraldsim/analysis.hpp"
#include "heraldsim/homodyne.hpp"
#include "heraldsim/prep.hpp"
#include "heraldsim/tomography.hpp"

namespace heraldsim {

// All pipeline knobs as a flat key=value config. Every key has a default, so
// an empty file is a valid config; unknown keys are rejected.
struct RunConfig {
    double lambda = 0.12;
    double theta = 0.39269908169872414;  // 22.5 deg
    double eta_trigger = 0.1;
    double p_dark = 1e-5;
    double eta_signal = 1.0;
    int cutoff = 10;
    int windows = 100;
    int samples_per_window = 1000;
    int vacuum_samples = 100000;
    std::uint64_t seed = 20260808;
    PhaseModel phase_model = PhaseModel::linear_sweep;
    double phase_start = 0.0;
    double phase_increment = 1.9416110387254665;  // pi * (golden ratio - 1)
    double phase_sigma = 0.05;
    int max_iterations = 2000;
    double loglik_tolerance = 1e-10;
    int phase_bins = 12;
    int q_bins = 100;
    std::string output_dir = "out";
    std::vector<double> sweep_thetas = {0.0, 0.19634954084936207, 0.27925268031909273,
                                        0.33161255787892263, 0.39269908169872414};

    static RunConfig from_file(const std::filesystem::path& path);
    void apply_override(const std::string& key, const std::string& value);
    void validate() const;
    std::string to_text() const;  // full echo, fixed key order, reloadable

    HeraldConfig herald_config() const;
    AcquisitionConfig acquisition() const;
    ReconstructionSettings reconstruction_settings() const;
    PhaseTrajectory trajectory() const;
};

// Angle parsing shared with the CLI: bare number = radians, "deg" suffix = degrees.
double parse_angle(const std::string& text, const std::string& key);

struct SweepSpec {
    std::vector<double> thetas;
    RunConfig base;
};

struct SimulateArtifacts {
    std::filesystem::path signal_file;
    std::filesystem::path vacuum_file;
    std::filesystem::path manifest_file;
    std::filesystem::path phases_file;
    double herald_probability = 0.0;
};

struct ReconstructArtifacts {
    std::filesystem::path rho_file;
    std::filesystem::path diagnostics_file;
    std::filesystem::path variances_file;
    ReconstructedState state;
    VarianceFit fit;
    double pooled_variance = 0.0;
};

struct AnalyzeArtifacts {
    std::filesystem::path report_file;
    std::filesystem::path wigner_file;
    std::filesystem::path cross_q_file;
    std::filesystem::path cross_p_file;
    std::filesystem::path variance_phase_file;
    std::filesystem::path populations_file;
    EfficiencyReport report;
    double wigner00 = 0.0;
};

SimulateArtifacts run_simulate(const RunConfig& config, const std::filesystem::path& out_dir);

ReconstructArtifacts run_reconstruct(const std::filesystem::path& signal_file,
                                     const std::filesystem::path& vacuum_file,
                                     const RunConfig& config,
                                     const std::filesystem::path& out_dir);

AnalyzeArtifacts run_analyze(const std::filesystem::path& rho_file,
                             const std::filesystem::path& out_dir);

// Full pipeline per theta; summary.csv rows ordered by theta. Failed points
// are recorded in the status column and do not stop the sweep. Returns the
// number of failed points.
int run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir);

// Fast invariant suite (< 60 s): unitarity, loss-channel completeness,
// loss-inversion identity, pdf moments, MaxLik monotonicity. `fault` injects
// a deliberate defect ("hermite") to demonstrate the checks have teeth.
bool run_selftest(std::ostream& out, const std::string& fault = "");

} // namespace heraldsim
