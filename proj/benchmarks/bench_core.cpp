#include <benchmark/benchmark.h>

#include "heraldsim/analysis.hpp"
#include "heraldsim/homodyne.hpp"
#include "heraldsim/prep.hpp"
#include "heraldsim/tomography.hpp"

using namespace heraldsim;

static void BM_BeamSplitterUnitary(benchmark::State& state) {
    FockCutoff cutoff(static_cast<int>(state.range(0)));
    auto setting = BeamSplitterSetting::from_reflectivity(0.5);
    for (auto _ : state) {
        CMatrix u = beam_splitter_unitary(setting, cutoff);
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(BM_BeamSplitterUnitary)->Arg(6)->Arg(10)->Arg(16);

static void BM_HeraldSignal(benchmark::State& state) {
    HeraldConfig config{SqueezingParameter(0.12), BeamSplitterSetting::from_theta(0.3),
                        DetectorModel{0.1, 1e-5}, LossChannel(0.8), FockCutoff(10)};
    for (auto _ : state) {
        HeraldedState heralded = herald_signal(config);
        benchmark::DoNotOptimize(heralded.herald_probability);
    }
}
BENCHMARK(BM_HeraldSignal);

static void BM_QuadraturePdf(benchmark::State& state) {
    DensityMatrix rho = squeezed_vacuum(SqueezingParameter(0.2), FockCutoff(10));
    std::vector<double> grid;
    for (double q = -6.0; q <= 6.0; q += 0.01) grid.push_back(q);
    for (auto _ : state) {
        auto pdf = quadrature_pdf(rho, 0.7, grid);
        benchmark::DoNotOptimize(pdf);
    }
}
BENCHMARK(BM_QuadraturePdf);

static void BM_SampleWindow(benchmark::State& state) {
    DensityMatrix rho = squeezed_vacuum(SqueezingParameter(0.2), FockCutoff(10));
    PhaseTrajectory trajectory = PhaseTrajectory::fixed(0.7, 1);
    for (auto _ : state) {
        auto ds = sample_quadratures(rho, trajectory, AcquisitionConfig{1, 1000, 42, 0});
        benchmark::DoNotOptimize(ds);
    }
}
BENCHMARK(BM_SampleWindow);

static void BM_MaxlikReconstruct(benchmark::State& state) {
    DensityMatrix rho = squeezed_vacuum(SqueezingParameter(0.15), FockCutoff(10));
    PhaseTrajectory trajectory = PhaseTrajectory::linear_sweep(0.0, 0.37, 20);
    QuadratureDataset ds = sample_quadratures(rho, trajectory, AcquisitionConfig{20, 500, 9, 0});
    ds.calibrated = true;
    auto samples = assign_phases_uniform(ds);
    ReconstructionSettings settings;
    settings.max_iterations = static_cast<int>(state.range(0));
    settings.log_likelihood_tolerance = 1e-15;
    for (auto _ : state) {
        auto rec = maxlik_reconstruct(samples, settings);
        benchmark::DoNotOptimize(rec.iterations_used);
    }
}
BENCHMARK(BM_MaxlikReconstruct)->Arg(10)->Arg(50);

static void BM_WignerGrid(benchmark::State& state) {
    DensityMatrix rho = squeezed_vacuum(SqueezingParameter(0.2), FockCutoff(10));
    for (auto _ : state) {
        WignerGrid grid = wigner_function(rho);
        benchmark::DoNotOptimize(grid.integral);
    }
}
BENCHMARK(BM_WignerGrid);

BENCHMARK_MAIN();
