#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "heraldsim/fock.hpp"

namespace heraldsim {

enum class PhaseModel { fixed, linear_sweep, random_walk };

PhaseModel phase_model_from_string(const std::string& name);
std::string to_string(PhaseModel model);

// Local-oscillator phase per acquisition window.
struct PhaseTrajectory {
    std::vector<double> phases;

    static PhaseTrajectory fixed(double phi, int windows);
    static PhaseTrajectory linear_sweep(double start, double increment, int windows);
    static PhaseTrajectory random_walk(double start, double sigma, int windows, std::uint64_t seed);
};

struct AcquisitionConfig {
    int windows = 100;
    int samples_per_window = 1000;
    std::uint64_t rng_seed = 1;
    int vacuum_samples = 100000;

    void validate() const {
        if (windows <= 0) throw config_error("windows: must be positive");
        if (samples_per_window <= 0) throw config_error("samples_per_window: must be positive");
        if (vacuum_samples < 0) throw config_error("vacuum_samples: must be nonnegative");
    }
};

// Windowed homodyne samples plus vacuum-calibration samples. Quadrature
// convention: vacuum variance 1/2.
struct QuadratureDataset {
    std::vector<std::vector<double>> windows;
    std::vector<double> vacuum_calibration;
    std::map<std::string, std::string> metadata;
    double scale = 1.0;        // cumulative calibration factor applied so far
    bool calibrated = false;

    int window_count() const { return static_cast<int>(windows.size()); }
    std::size_t total_samples() const {
        std::size_t n = 0;
        for (const auto& w : windows) n += w.size();
        return n;
    }
};

// psi_n(q) for n = 0..max_n: normalized Hermite functions by the stable
// three-term recurrence on psi directly.
std::vector<double> hermite_functions(int max_n, double q);

namespace detail {
// Test seam for selftest fault injection: replaces the Hermite evaluator
// inside quadrature_pdf / quadrature_projector when set. Not for normal use.
using HermiteFn = std::vector<double> (*)(int, double);
extern HermiteFn hermite_override;
} // namespace detail

// pr(q|phi) = sum_{nm} rho_{nm} psi_n(q) psi_m(q) e^{i(n-m)phi}.
std::vector<double> quadrature_pdf(const DensityMatrix& rho, double phi,
                                   std::span<const double> q_grid);

// Monte Carlo homodyne acquisition: inverse-CDF sampling on a dense grid,
// deterministic given the seed (per-window derived streams, see random.hpp).
QuadratureDataset sample_quadratures(const DensityMatrix& rho, const PhaseTrajectory& trajectory,
                                     const AcquisitionConfig& acq);

// Rescale so the vacuum calibration variance is exactly 1/2; records the
// factor in scale/metadata. Idempotent up to statistical noise.
QuadratureDataset calibrate_scale(QuadratureDataset dataset);

// Text persistence: '#'-prefixed key=value header, then one sample per line
// "window_index<TAB>value". Vacuum file uses window_index -1.
void write_dataset(const QuadratureDataset& dataset, const std::filesystem::path& signal_file,
                   const std::filesystem::path& vacuum_file);
QuadratureDataset read_dataset(const std::filesystem::path& signal_file,
                               const std::filesystem::path& vacuum_file);

} // namespace heraldsim
