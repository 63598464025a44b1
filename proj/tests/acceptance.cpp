// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "heraldsim/pipeline.hpp"
#include "heraldsim/random.hpp"
#include "support.hpp"

using namespace heraldsim;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, const std::function<bool(std::string&)>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& err) {
        detail = std::string("exception: ") + err.what();
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    std::printf("[%s] criterion %2d: %s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL", number,
                name.c_str(), seconds, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::filesystem::path work_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "heraldsim_acceptance" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

struct SummaryRow {
    double theta = 0.0, reflectivity = 0.0;
    double rho00 = 0.0, rho11 = 0.0, rho22 = 0.0;
    double q2_minus = 0.0, db = 0.0, wigner00 = 0.0, fidelity_ideal = 0.0;
    std::string status;
};

std::vector<SummaryRow> read_summary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("missing summary: " + path.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::vector<std::string> fields;
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 10) throw data_error("malformed summary row: " + line);
        SummaryRow row;
        row.theta = std::stod(fields[0]);
        row.reflectivity = std::stod(fields[1]);
        row.rho00 = std::stod(fields[2]);
        row.rho11 = std::stod(fields[3]);
        row.rho22 = std::stod(fields[4]);
        row.q2_minus = std::stod(fields[5]);
        row.db = std::stod(fields[6]);
        row.wigner00 = std::stod(fields[7]);
        row.fidelity_ideal = std::stod(fields[8]);
        row.status = fields[9];
        rows.push_back(row);
    }
    return rows;
}

bool trace_monotone(const std::vector<double>& trace) {
    for (std::size_t k = 1; k < trace.size(); ++k)
        if (trace[k] < trace[k - 1] - 1e-9) return false;
    return true;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.5g", v);
    return buf;
}

} // namespace

int main() {
    std::printf("heraldsim acceptance suite\n");

    std::vector<std::vector<double>> collected_traces;

    // 1. Single-photon efficiency chain: lambda = 0.12 at full reflection,
    //    signal loss solved so the exact heralded state has variance 1.05.
    criterion(1, "single-photon efficiency chain (1.05 => eta 0.55)", [&](std::string& detail) {
        const auto t0 = std::chrono::steady_clock::now();
        RunConfig cfg;
        cfg.lambda = 0.12;
        cfg.theta = 0.0;  // R = 1
        cfg.eta_trigger = 1.0;
        cfg.p_dark = 0.0;
        cfg.eta_signal = 1.0;
        cfg.vacuum_samples = 1000000;
        cfg.seed = 6;

        // Loss scales the variance excess linearly: Var(eta) = 1/2 + eta
        // (Var0 - 1/2), so eta_s solves in closed form against the exact
        // (truncated) heralded state.
        HeraldedState lossless = herald_signal(cfg.herald_config());
        const double excess = marginal_variance(lossless.state, 0.0) - 0.5;
        cfg.eta_signal = (1.05 - 0.5) / excess;

        const double exact = marginal_variance(herald_signal(cfg.herald_config()).state, 0.0);
        if (std::abs(exact - 1.05) > 1e-9) {
            detail = "configured variance off by " + fmt(exact - 1.05);
            return false;
        }

        auto dir = work_dir("criterion1");
        run_simulate(cfg, dir);
        ReconstructArtifacts rec = run_reconstruct(dir / "signal.dat", dir / "vacuum.dat", cfg, dir);
        AnalyzeArtifacts ana = run_analyze(rec.rho_file, dir);
        collected_traces.push_back(rec.state.log_likelihood_trace);

        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        detail = "pooled " + fmt(rec.pooled_variance) + ", eta_single " +
                 fmt(ana.report.eta_single) + ", eta_s " + fmt(cfg.eta_signal);
        return std::abs(rec.pooled_variance - 1.05) < 0.02 &&
               std::abs(ana.report.eta_single - 0.55) < 0.02 && seconds < 30.0;
    });

    // 2. Squeezing chain: lambda and eta_s chosen so the exact lossy squeezed
    //    state has Q2- = 0.43325 (0.62 dB).
    criterion(2, "squeezing chain (0.62 dB reconstruction)", [&](std::string& detail) {
        const auto t0 = std::chrono::steady_clock::now();
        const double target_q2 = 0.43325;
        // Aim for the paper's 29% overall efficiency: solve lambda from the
        // analytic squeezed-state variance, then pin eta_s against the exact
        // (truncated) heralded state, where Var(eta) = 1/2 - eta (1/2 - V0).
        const double k = 1.0 - 2.0 * (0.5 - target_q2) / 0.29;
        const double lambda = (1.0 - k) / (1.0 + k);

        RunConfig cfg;
        cfg.lambda = lambda;
        cfg.theta = std::numbers::pi / 8;  // R = 1/2
        cfg.eta_trigger = 1.0;
        cfg.p_dark = 0.0;
        cfg.eta_signal = 1.0;
        cfg.windows = 50;
        cfg.samples_per_window = 2000;  // 1e5 samples
        cfg.vacuum_samples = 1000000;
        cfg.phase_bins = 16;
        cfg.seed = 22;

        const double v_pure =
            marginal_variance(herald_signal(cfg.herald_config()).state, std::numbers::pi / 2);
        cfg.eta_signal = (0.5 - target_q2) / (0.5 - v_pure);

        const double exact =
            marginal_variance(herald_signal(cfg.herald_config()).state, std::numbers::pi / 2);
        if (std::abs(exact - target_q2) > 1e-9) {
            detail = "configured Q2- off by " + fmt(exact - target_q2);
            return false;
        }

        auto dir = work_dir("criterion2");
        run_simulate(cfg, dir);
        ReconstructArtifacts rec = run_reconstruct(dir / "signal.dat", dir / "vacuum.dat", cfg, dir);
        AnalyzeArtifacts ana = run_analyze(rec.rho_file, dir);
        collected_traces.push_back(rec.state.log_likelihood_trace);

        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        detail = "squeezing_db " + fmt(ana.report.squeezing_db) + " (target 0.62 +- 0.08), " +
                 fmt(seconds) + " s";
        return std::abs(ana.report.squeezing_db - 0.62) < 0.08 && seconds < 120.0;
    });

    // 3. Loss-inversion identity of the squeezed-efficiency estimator.
    criterion(3, "loss-inversion identity (30/30 to 1e-9)", [](std::string& detail) {
        const auto t0 = std::chrono::steady_clock::now();
        FockCutoff cutoff(18);
        int passed = 0;
        double worst = 0.0;
        for (double lambda : {0.05, 0.1, 0.2}) {
            DensityMatrix pure = squeezed_vacuum(SqueezingParameter(lambda), cutoff);
            for (int k = 1; k <= 10; ++k) {
                const double eta = 0.1 * k;
                DensityMatrix lossy = loss_apply(pure, LossChannel(eta));
                VarianceExtremes ext = variance_extremes(lossy);
                const double err =
                    std::abs(efficiency_squeezed(ext.q2_plus(), ext.q2_minus()) - eta);
                worst = std::max(worst, err);
                if (err < 1e-9) ++passed;
            }
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        detail = std::to_string(passed) + "/30, worst " + fmt(worst);
        return passed == 30 && seconds < 1.0;
    });

    // 4. Minimum-uncertainty boundary.
    criterion(4, "minimum-uncertainty boundary", [](std::string& detail) {
        double worst_pure = 0.0;
        double smallest_excess = 1e9;
        for (double lambda : {0.05, 0.1, 0.2}) {
            const double plus = (1.0 + lambda) / (1.0 - lambda) / 2.0;
            const double minus = (1.0 - lambda) / (1.0 + lambda) / 2.0;
            worst_pure = std::max(worst_pure, std::abs(plus * minus - 0.25));

            DensityMatrix sv = squeezed_vacuum(SqueezingParameter(lambda), FockCutoff(18));
            VarianceExtremes ext = variance_extremes(sv);
            worst_pure = std::max(worst_pure, std::abs(ext.q2_plus() * ext.q2_minus() - 0.25));

            for (int k = 1; k <= 9; ++k) {
                DensityMatrix lossy = loss_apply(sv, LossChannel(0.1 * k));
                VarianceExtremes lossy_ext = variance_extremes(lossy);
                smallest_excess = std::min(
                    smallest_excess, lossy_ext.q2_plus() * lossy_ext.q2_minus() - 0.25);
            }
        }
        detail = "pure deviation " + fmt(worst_pure) + ", smallest lossy excess " +
                 fmt(smallest_excess);
        return worst_pure < 1e-12 && smallest_excess > 0.0;
    });

    // 5. Fock variance law at 8 phases.
    criterion(5, "Fock variance law (2n+1)/2", [](std::string& detail) {
        double worst = 0.0;
        for (int n = 0; n <= 5; ++n) {
            DensityMatrix fock = DensityMatrix::fock_state(n, FockCutoff(10));
            for (int k = 0; k < 8; ++k) {
                const double phi = k * std::numbers::pi / 8.0;
                worst = std::max(worst,
                                 std::abs(marginal_variance(fock, phi) - (2.0 * n + 1.0) / 2.0));
            }
        }
        detail = "worst deviation " + fmt(worst);
        return worst < 1e-10;
    });

    // 6. Wigner negativity of the eta = 0.55 single photon.
    criterion(6, "Wigner negativity at the origin", [&](std::string& detail) {
        FockCutoff cutoff(10);
        DensityMatrix truth =
            loss_apply(DensityMatrix::fock_state(1, cutoff), LossChannel(0.55));
        QuadratureDataset ds = sample_quadratures(
            truth, PhaseTrajectory::linear_sweep(0.0, 1.9416110387254665, 100),
            AcquisitionConfig{100, 1000, 103, 500000});
        ds = calibrate_scale(std::move(ds));
        VarianceFit fit = fit_variance_law(window_variances(ds));
        auto samples = fit.phase_sensitive() ? assign_phases(ds, fit) : assign_phases_uniform(ds);
        ReconstructedState rec = maxlik_reconstruct(samples, ReconstructionSettings{});
        collected_traces.push_back(rec.log_likelihood_trace);
        const double w00 = wigner_origin(rec.rho);

        DensityMatrix one = DensityMatrix::fock_state(1, cutoff);
        const double kernel_value = wigner_origin(one);
        const double oracle = testsupport::wigner_origin_from_marginals(one, 4);

        detail = "reconstructed W(0,0) " + fmt(w00) + ", kernel vs integration oracle " +
                 fmt(std::abs(kernel_value - oracle));
        return std::abs(w00 - (-0.0318)) < 0.01 && w00 < 0.0 &&
               std::abs(kernel_value - oracle) < 1e-9 &&
               std::abs(kernel_value - (-1.0 / std::numbers::pi)) < 1e-12;
    });

    // 7. Bridge sweep across five wave-plate angles.
    criterion(7, "theta sweep (R law, fidelity, populations)", [&](std::string& detail) {
        const auto t0 = std::chrono::steady_clock::now();
        RunConfig base;
        base.lambda = 0.15;
        base.eta_trigger = 1.0;
        base.p_dark = 0.0;
        base.eta_signal = 1.0;
        base.vacuum_samples = 500000;
        base.seed = 31;

        SweepSpec spec;
        spec.base = base;
        const double deg = std::numbers::pi / 180.0;
        spec.thetas = {0.0, 11.25 * deg, 16.0 * deg, 19.0 * deg, 22.5 * deg};

        auto dir = work_dir("criterion7");
        const int sweep_failures = run_sweep(spec, dir);
        std::vector<SummaryRow> rows = read_summary(dir / "summary.csv");
        if (sweep_failures != 0 || rows.size() != 5) {
            detail = "sweep failures " + std::to_string(sweep_failures);
            return false;
        }

        double worst_r = 0.0, worst_fidelity = 1.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double expected_r = std::cos(2.0 * rows[i].theta) * std::cos(2.0 * rows[i].theta);
            worst_r = std::max(worst_r, std::abs(rows[i].reflectivity - expected_r));

            // Fidelity against the exact heralded state of the same config.
            char name[48];
            std::snprintf(name, sizeof(name), "theta_%08.4fdeg", rows[i].theta / deg);
            DensityMatrix rho = read_reconstruction(dir / name / "rho.txt");
            RunConfig cfg = base;
            cfg.theta = rows[i].theta;
            DensityMatrix exact = herald_signal(cfg.herald_config()).state;
            worst_fidelity = std::min(worst_fidelity, fidelity(rho, exact));
        }

        DensityMatrix rho_balanced = read_reconstruction(dir / "theta_022.5000deg" / "rho.txt");
        double odd = 0.0;
        for (int n = 1; n < rho_balanced.dim(); n += 2) odd += rho_balanced.population(n);
        DensityMatrix rho_reflective = read_reconstruction(dir / "theta_000.0000deg" / "rho.txt");
        double outside01 = 0.0;
        for (int n = 2; n < rho_reflective.dim(); ++n) outside01 += rho_reflective.population(n);

        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        detail = "worst |R - cos^2|" + fmt(worst_r) + ", worst fidelity " + fmt(worst_fidelity) +
                 ", odd@22.5 " + fmt(odd) + ", outside01@0 " + fmt(outside01) + ", " +
                 fmt(seconds) + " s";
        return worst_r < 1e-12 && worst_fidelity >= 0.97 && odd < 0.05 && outside01 < 0.05 &&
               seconds < 300.0;
    });

    // 8. MaxLik properties: monotone likelihood, analytic fixed point, vacuum
    //    recovery.
    criterion(8, "MaxLik monotonicity, fixed point, vacuum recovery", [&](std::string& detail) {
        // Vacuum recovery from 1e4 samples.
        DensityMatrix vac = DensityMatrix::vacuum(FockCutoff(10));
        QuadratureDataset ds =
            sample_quadratures(vac, PhaseTrajectory::linear_sweep(0.0, 0.61, 10),
                               AcquisitionConfig{10, 1000, 59, 100000});
        ds = calibrate_scale(std::move(ds));
        VarianceFit fit = fit_variance_law(window_variances(ds));
        auto samples = fit.phase_sensitive() ? assign_phases(ds, fit) : assign_phases_uniform(ds);
        ReconstructedState rec = maxlik_reconstruct(samples, ReconstructionSettings{});
        collected_traces.push_back(rec.log_likelihood_trace);
        const double vacuum_pop = rec.rho.population(0);

        // Analytic-frequency fixed point at D = 6.
        FockCutoff cutoff(6);
        DensityMatrix target = DensityMatrix::normalized(testsupport::random_density(6, 301));
        const int q_bins = 240, phase_bins = 12;
        const double q_lo = -6.0, dq = 12.0 / q_bins;
        CMatrix r_op = CMatrix::Zero(6, 6);
        for (int fi = 0; fi < phase_bins; ++fi) {
            const double phi = (fi + 0.5) * std::numbers::pi / phase_bins;
            std::vector<double> centers(q_bins);
            for (int qi = 0; qi < q_bins; ++qi) centers[qi] = q_lo + (qi + 0.5) * dq;
            std::vector<double> pdf = quadrature_pdf(target, phi, centers);
            for (int qi = 0; qi < q_bins; ++qi) {
                if (pdf[qi] < 1e-12) continue;
                CMatrix proj = quadrature_projector(centers[qi], phi, cutoff);
                const double prob = (proj * target.matrix()).trace().real();
                r_op += (pdf[qi] * dq / phase_bins / prob) * proj;
            }
        }
        CMatrix next = r_op * target.matrix() * r_op;
        next /= next.trace().real();
        const double residual = (next - target.matrix()).cwiseAbs().maxCoeff();

        int monotone = 0;
        for (const auto& trace : collected_traces)
            if (trace_monotone(trace)) ++monotone;

        detail = "vacuum pop " + fmt(vacuum_pop) + ", fixed-point residual " + fmt(residual) +
                 ", monotone traces " + std::to_string(monotone) + "/" +
                 std::to_string(collected_traces.size());
        return vacuum_pop >= 0.98 && residual < 1e-8 &&
               monotone == static_cast<int>(collected_traces.size());
    });

    // 9. Pure-state path versus dense-matrix path.
    criterion(9, "herald brute-force equivalence (20 configs)", [](std::string& detail) {
        std::mt19937_64 engine(4242);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            HeraldConfig config{
                SqueezingParameter(0.02 + 0.43 * rng::uniform01(engine)),
                BeamSplitterSetting::from_reflectivity(rng::uniform01(engine)),
                DetectorModel{rng::uniform01(engine), 0.02 * rng::uniform01(engine)},
                LossChannel(0.2 + 0.8 * rng::uniform01(engine)), FockCutoff(10)};
            HeraldedState fast = herald_signal(config, HeraldMethod::pure_path);
            HeraldedState dense = herald_signal(config, HeraldMethod::dense_path);
            worst = std::max(worst,
                             (fast.state.matrix() - dense.state.matrix()).cwiseAbs().maxCoeff());
            worst = std::max(worst,
                             std::abs(fast.herald_probability - dense.herald_probability));
        }
        detail = "worst deviation " + fmt(worst);
        return worst < 1e-9;
    });

    // 10. Determinism of the sweep.
    criterion(10, "sweep determinism (byte-identical trees)", [](std::string& detail) {
        RunConfig base;
        base.eta_trigger = 1.0;
        base.p_dark = 0.0;
        base.windows = 20;
        base.samples_per_window = 1000;
        base.vacuum_samples = 20000;
        base.seed = 99;
        SweepSpec spec;
        spec.base = base;
        spec.thetas = {0.0, std::numbers::pi / 8};

        auto dir_a = work_dir("criterion10_a");
        auto dir_b = work_dir("criterion10_b");
        run_sweep(spec, dir_a);
        run_sweep(spec, dir_b);

        std::size_t compared = 0;
        for (auto& entry : std::filesystem::recursive_directory_iterator(dir_a)) {
            if (!entry.is_regular_file()) continue;
            const auto rel = std::filesystem::relative(entry.path(), dir_a);
            if (testsupport::slurp(entry.path()) != testsupport::slurp(dir_b / rel)) {
                detail = "differs: " + rel.string();
                return false;
            }
            ++compared;
        }
        detail = std::to_string(compared) + " files byte-identical";
        return compared > 0;
    });

    std::printf("%d/10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
