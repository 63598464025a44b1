#include "heraldsim/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "heraldsim/random.hpp"

namespace heraldsim {

namespace {

std::string g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string g15(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", value);
    return buf;
}

double parse_double_value(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw config_error(key + ": cannot parse number '" + text + "'");
    }
}

int parse_int_value(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        long v = std::stol(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw config_error(key + ": cannot parse integer '" + text + "'");
    }
}

std::uint64_t parse_u64_value(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw config_error(key + ": cannot parse seed '" + text + "'");
    }
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open for writing: " + path.string());
    return out;
}

} // namespace

double parse_angle(const std::string& text, const std::string& key) {
    std::string body = trim(text);
    bool degrees = false;
    if (body.size() > 3 && body.substr(body.size() - 3) == "deg") {
        degrees = true;
        body = trim(body.substr(0, body.size() - 3));
    }
    double value = parse_double_value(key, body);
    return degrees ? value * std::numbers::pi / 180.0 : value;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config: " + path.string());
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw config_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected key=value");
        cfg.apply_override(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

void RunConfig::apply_override(const std::string& key, const std::string& value) {
    RunConfig next = *this;
    if (key == "lambda") next.lambda = parse_double_value(key, value);
    else if (key == "theta") next.theta = parse_angle(value, key);
    else if (key == "eta_trigger") next.eta_trigger = parse_double_value(key, value);
    else if (key == "p_dark") next.p_dark = parse_double_value(key, value);
    else if (key == "eta_signal") next.eta_signal = parse_double_value(key, value);
    else if (key == "cutoff") next.cutoff = parse_int_value(key, value);
    else if (key == "windows") next.windows = parse_int_value(key, value);
    else if (key == "samples_per_window") next.samples_per_window = parse_int_value(key, value);
    else if (key == "vacuum_samples") next.vacuum_samples = parse_int_value(key, value);
    else if (key == "seed") next.seed = parse_u64_value(key, value);
    else if (key == "phase_model") next.phase_model = phase_model_from_string(value);
    else if (key == "phase_start") next.phase_start = parse_angle(value, key);
    else if (key == "phase_increment") next.phase_increment = parse_angle(value, key);
    else if (key == "phase_sigma") next.phase_sigma = parse_double_value(key, value);
    else if (key == "max_iterations") next.max_iterations = parse_int_value(key, value);
    else if (key == "loglik_tolerance") next.loglik_tolerance = parse_double_value(key, value);
    else if (key == "phase_bins") next.phase_bins = parse_int_value(key, value);
    else if (key == "q_bins") next.q_bins = parse_int_value(key, value);
    else if (key == "output_dir") next.output_dir = value;
    else if (key == "sweep_thetas") {
        if (trim(value).empty()) throw config_error("sweep_thetas: empty list");
        next.sweep_thetas.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ','))
            next.sweep_thetas.push_back(parse_angle(item, "sweep_thetas"));
    } else {
        throw config_error("unknown key '" + key + "'");
    }
    // Range errors must not leave a half-updated configuration behind; the
    // failed key is reported by validate() since only it changed.
    next.validate();
    *this = std::move(next);
}

void RunConfig::validate() const {
    if (!(lambda >= 0.0 && lambda < 1.0)) throw config_error("lambda: must be in [0, 1)");
    if (!std::isfinite(theta)) throw config_error("theta: must be finite");
    if (!(eta_trigger >= 0.0 && eta_trigger <= 1.0))
        throw config_error("eta_trigger: must be in [0, 1]");
    if (!(p_dark >= 0.0 && p_dark < 1.0)) throw config_error("p_dark: must be in [0, 1)");
    if (!(eta_signal >= 0.0 && eta_signal <= 1.0))
        throw config_error("eta_signal: must be in [0, 1]");
    if (cutoff < 2) throw config_error("cutoff: must be >= 2");
    if (windows <= 0) throw config_error("windows: must be positive");
    if (samples_per_window <= 0) throw config_error("samples_per_window: must be positive");
    if (vacuum_samples < 0) throw config_error("vacuum_samples: must be nonnegative");
    if (!std::isfinite(phase_start)) throw config_error("phase_start: must be finite");
    if (!std::isfinite(phase_increment)) throw config_error("phase_increment: must be finite");
    if (!(phase_sigma >= 0.0)) throw config_error("phase_sigma: must be nonnegative");
    if (max_iterations <= 0) throw config_error("max_iterations: must be positive");
    if (!(loglik_tolerance > 0.0)) throw config_error("loglik_tolerance: must be positive");
    if (phase_bins <= 0) throw config_error("phase_bins: must be positive");
    if (q_bins <= 0) throw config_error("q_bins: must be positive");
    if (sweep_thetas.empty()) throw config_error("sweep_thetas: empty list");
    for (double t : sweep_thetas)
        if (!std::isfinite(t)) throw config_error("sweep_thetas: non-finite angle");
}

std::string RunConfig::to_text() const {
    std::ostringstream out;
    out << "lambda=" << g17(lambda) << "\n";
    out << "theta=" << g17(theta) << "\n";
    out << "eta_trigger=" << g17(eta_trigger) << "\n";
    out << "p_dark=" << g17(p_dark) << "\n";
    out << "eta_signal=" << g17(eta_signal) << "\n";
    out << "cutoff=" << cutoff << "\n";
    out << "windows=" << windows << "\n";
    out << "samples_per_window=" << samples_per_window << "\n";
    out << "vacuum_samples=" << vacuum_samples << "\n";
    out << "seed=" << seed << "\n";
    out << "phase_model=" << to_string(phase_model) << "\n";
    out << "phase_start=" << g17(phase_start) << "\n";
    out << "phase_increment=" << g17(phase_increment) << "\n";
    out << "phase_sigma=" << g17(phase_sigma) << "\n";
    out << "max_iterations=" << max_iterations << "\n";
    out << "loglik_tolerance=" << g17(loglik_tolerance) << "\n";
    out << "phase_bins=" << phase_bins << "\n";
    out << "q_bins=" << q_bins << "\n";
    out << "output_dir=" << output_dir << "\n";
    out << "sweep_thetas=";
    for (std::size_t i = 0; i < sweep_thetas.size(); ++i) {
        if (i) out << ",";
        out << g17(sweep_thetas[i]);
    }
    out << "\n";
    return out.str();
}

HeraldConfig RunConfig::herald_config() const {
    return HeraldConfig{SqueezingParameter(lambda), BeamSplitterSetting::from_theta(theta),
                        DetectorModel{eta_trigger, p_dark}, LossChannel(eta_signal),
                        FockCutoff(cutoff)};
}

AcquisitionConfig RunConfig::acquisition() const {
    return AcquisitionConfig{windows, samples_per_window, seed, vacuum_samples};
}

ReconstructionSettings RunConfig::reconstruction_settings() const {
    return ReconstructionSettings{FockCutoff(cutoff), max_iterations, loglik_tolerance,
                                  phase_bins, q_bins};
}

PhaseTrajectory RunConfig::trajectory() const {
    switch (phase_model) {
        case PhaseModel::fixed:
            return PhaseTrajectory::fixed(phase_start, windows);
        case PhaseModel::linear_sweep:
            return PhaseTrajectory::linear_sweep(phase_start, phase_increment, windows);
        case PhaseModel::random_walk:
            // Trajectory stream index = windows + 1 (windows 0..W-1 sample, W vacuum).
            return PhaseTrajectory::random_walk(
                phase_start, phase_sigma, windows,
                rng::derive_seed(seed, static_cast<std::uint64_t>(windows) + 1));
    }
    throw config_error("phase_model: invalid");
}

namespace {

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw data_error("cannot create output directory: " + dir.string());
}

} // namespace

SimulateArtifacts run_simulate(const RunConfig& config, const std::filesystem::path& out_dir) {
    config.validate();
    ensure_directory(out_dir);

    HeraldedState herald = herald_signal(config.herald_config());
    PhaseTrajectory trajectory = config.trajectory();
    QuadratureDataset dataset = sample_quadratures(herald.state, trajectory, config.acquisition());

    // Config echo travels with the dataset.
    std::istringstream echo(config.to_text());
    std::string line;
    while (std::getline(echo, line)) {
        std::size_t eq = line.find('=');
        if (eq != std::string::npos)
            dataset.metadata["config." + line.substr(0, eq)] = line.substr(eq + 1);
    }

    SimulateArtifacts art;
    art.signal_file = out_dir / "signal.dat";
    art.vacuum_file = out_dir / "vacuum.dat";
    art.manifest_file = out_dir / "manifest.cfg";
    art.phases_file = out_dir / "phases_true.csv";
    art.herald_probability = herald.herald_probability;

    write_dataset(dataset, art.signal_file, art.vacuum_file);

    {
        auto out = open_output(art.manifest_file);
        out << config.to_text();
        out << "# herald_probability=" << g17(herald.herald_probability) << "\n";
        out << "# reflectivity=" << g17(config.herald_config().setting.reflectivity()) << "\n";
        out << "# theta_deg=" << g17(config.theta * 180.0 / std::numbers::pi) << "\n";
    }
    {
        auto out = open_output(art.phases_file);
        out << "window,phi\n";
        for (std::size_t w = 0; w < trajectory.phases.size(); ++w)
            out << w << "," << g15(trajectory.phases[w]) << "\n";
    }
    return art;
}

ReconstructArtifacts run_reconstruct(const std::filesystem::path& signal_file,
                                     const std::filesystem::path& vacuum_file,
                                     const RunConfig& config,
                                     const std::filesystem::path& out_dir) {
    config.validate();
    ensure_directory(out_dir);

    QuadratureDataset dataset = read_dataset(signal_file, vacuum_file);
    if (dataset.total_samples() == 0) throw data_error("no samples");
    if (!dataset.calibrated) dataset = calibrate_scale(std::move(dataset));

    std::vector<WindowVariance> variances = window_variances(dataset);
    VarianceFit fit = fit_variance_law(variances);
    std::vector<PhasedSample> samples =
        fit.phase_sensitive() ? assign_phases(dataset, fit) : assign_phases_uniform(dataset);

    ReconstructedState state = maxlik_reconstruct(samples, config.reconstruction_settings());

    // Pooled variance of all calibrated samples.
    double mean = 0.0;
    std::size_t total = 0;
    for (const auto& w : dataset.windows)
        for (double q : w) {
            mean += q;
            ++total;
        }
    mean /= static_cast<double>(total);
    double pooled = 0.0;
    for (const auto& w : dataset.windows)
        for (double q : w) pooled += (q - mean) * (q - mean);
    pooled /= static_cast<double>(total - 1);

    ReconstructArtifacts art{out_dir / "rho.txt", out_dir / "diagnostics.cfg",
                             out_dir / "variances.csv", std::move(state), fit, pooled};

    write_reconstruction(art.state, art.rho_file);

    // Per-window phase actually fed to the reconstruction.
    std::vector<double> window_phis(dataset.windows.size(), 0.0);
    {
        std::size_t cursor = 0;
        for (std::size_t w = 0; w < dataset.windows.size(); ++w) {
            window_phis[w] = samples[cursor].phi;
            cursor += dataset.windows[w].size();
        }
    }
    {
        auto out = open_output(art.variances_file);
        out << "window,variance,sigma_error,phi\n";
        for (std::size_t w = 0; w < variances.size(); ++w)
            out << variances[w].window_index << "," << g15(variances[w].variance) << ","
                << g15(variances[w].sigma_error) << "," << g15(window_phis[w]) << "\n";
    }
    {
        double product = (fit.A + fit.B) * (fit.A - fit.B);
        double db = std::numeric_limits<double>::quiet_NaN();
        if (fit.A - fit.B > 0.0) db = squeezing_db(fit.A - fit.B);
        auto out = open_output(art.diagnostics_file);
        out << "A=" << g17(fit.A) << "\n";
        out << "B=" << g17(fit.B) << "\n";
        out << "final_loglik=" << g17(art.state.final_log_likelihood()) << "\n";
        out << "iterations=" << art.state.iterations_used << "\n";
        out << "phase_sensitive=" << (fit.phase_sensitive() ? "true" : "false") << "\n";
        out << "pooled_variance=" << g17(pooled) << "\n";
        out << "samples=" << total << "\n";
        out << "scale=" << g17(dataset.scale) << "\n";
        out << "skipped_bins=" << art.state.skipped_bins << "\n";
        out << "squeezing_db_fit=" << g17(db) << "\n";
        out << "uncertainty_product=" << g17(product) << "\n";
        out << "windows=" << dataset.windows.size() << "\n";
    }
    return art;
}

AnalyzeArtifacts run_analyze(const std::filesystem::path& rho_file,
                             const std::filesystem::path& out_dir) {
    ensure_directory(out_dir);
    DensityMatrix rho = read_reconstruction(rho_file);
    EfficiencyReport report = efficiency_report(rho);
    WignerGrid grid = wigner_function(rho);

    AnalyzeArtifacts art;
    art.report_file = out_dir / "report.cfg";
    art.wigner_file = out_dir / "wigner.csv";
    art.cross_q_file = out_dir / "wigner_cross_q.csv";
    art.cross_p_file = out_dir / "wigner_cross_p.csv";
    art.variance_phase_file = out_dir / "variance_vs_phase.csv";
    art.populations_file = out_dir / "populations.csv";
    art.report = report;
    art.wigner00 = wigner_origin(rho);

    {
        auto out = open_output(art.report_file);
        out << "eta_single=" << g17(report.eta_single) << "\n";
        out << "eta_squeezed=" << g17(report.eta_squeezed) << "\n";
        out << "q2_minus=" << g17(report.q2_minus) << "\n";
        out << "q2_plus=" << g17(report.q2_plus) << "\n";
        out << "squeezing_db=" << g17(report.squeezing_db) << "\n";
        out << "warnings=";
        for (std::size_t i = 0; i < report.warnings.size(); ++i) {
            if (i) out << ";";
            out << report.warnings[i];
        }
        out << "\n";
        out << "wigner_origin=" << g17(art.wigner00) << "\n";
    }
    {
        auto out = open_output(art.wigner_file);
        out << "q\\p";
        for (double p : grid.p_axis) out << "," << g15(p);
        out << "\n";
        for (std::size_t i = 0; i < grid.q_axis.size(); ++i) {
            out << g15(grid.q_axis[i]);
            for (std::size_t j = 0; j < grid.p_axis.size(); ++j)
                out << "," << g15(grid.values(static_cast<int>(i), static_cast<int>(j)));
            out << "\n";
        }
    }
    auto write_slice = [](const std::filesystem::path& path,
                          const std::vector<std::pair<double, double>>& slice,
                          const char* coord_name) {
        auto out = open_output(path);
        out << coord_name << ",w\n";
        for (const auto& [coord, value] : slice) out << g15(coord) << "," << g15(value) << "\n";
    };
    write_slice(art.cross_q_file, wigner_cross_section(grid, CrossSectionAxis::q_at_p0), "q");
    write_slice(art.cross_p_file, wigner_cross_section(grid, CrossSectionAxis::p_at_q0), "p");
    {
        auto out = open_output(art.variance_phase_file);
        out << "phi,variance\n";
        for (int k = 0; k < 64; ++k) {
            const double phi = k * std::numbers::pi / 64.0;
            out << g15(phi) << "," << g15(marginal_variance(rho, phi)) << "\n";
        }
    }
    {
        auto out = open_output(art.populations_file);
        out << "n,population\n";
        for (int n = 0; n < rho.dim(); ++n) out << n << "," << g15(rho.population(n)) << "\n";
    }
    return art;
}

int run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir) {
    if (spec.thetas.empty()) throw config_error("sweep: empty theta list");
    spec.base.validate();
    ensure_directory(out_dir);

    std::vector<double> thetas = spec.thetas;
    std::sort(thetas.begin(), thetas.end());

    struct Row {
        double theta = 0.0;
        double reflectivity = 0.0;
        double rho00 = 0.0, rho11 = 0.0, rho22 = 0.0;
        double q2_minus = 0.0, db = 0.0, wigner00 = 0.0, fidelity_ideal = 0.0;
        std::string status = "ok";
        bool ok = true;
    };
    std::vector<Row> rows;

    for (std::size_t i = 0; i < thetas.size(); ++i) {
        Row row;
        row.theta = thetas[i];
        row.reflectivity = BeamSplitterSetting::from_theta(thetas[i]).reflectivity();

        RunConfig cfg = spec.base;
        cfg.theta = thetas[i];
        // Per-point seed stream so sweep points are independent yet reproducible.
        cfg.seed = rng::derive_seed(spec.base.seed, 1000 + i);

        char name[48];
        std::snprintf(name, sizeof(name), "theta_%08.4fdeg", thetas[i] * 180.0 / std::numbers::pi);
        const std::filesystem::path point_dir = out_dir / name;

        try {
            SimulateArtifacts sim = run_simulate(cfg, point_dir);
            ReconstructArtifacts rec =
                run_reconstruct(sim.signal_file, sim.vacuum_file, cfg, point_dir);
            AnalyzeArtifacts ana = run_analyze(rec.rho_file, point_dir);

            const DensityMatrix& rho = rec.state.rho;
            row.rho00 = rho.population(0);
            row.rho11 = rho.population(1);
            row.rho22 = rho.dim() > 2 ? rho.population(2) : 0.0;
            row.q2_minus = ana.report.q2_minus;
            row.db = ana.report.squeezing_db;
            row.wigner00 = ana.wigner00;
            row.fidelity_ideal = fidelity(rho, ideal_target_state(cfg.herald_config()));
        } catch (const std::exception& err) {
            row.ok = false;
            std::string msg = err.what();
            for (char& c : msg)
                if (c == ',' || c == '\n') c = ';';
            row.status = "error: " + msg;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.rho00 = row.rho11 = row.rho22 = nan;
            row.q2_minus = row.db = row.wigner00 = row.fidelity_ideal = nan;
        }
        rows.push_back(std::move(row));
    }

    auto out = open_output(out_dir / "summary.csv");
    out << "theta_rad,R,rho00,rho11,rho22,q2_minus,squeezing_db,wigner00,fidelity_ideal,status\n";
    int failures = 0;
    for (const auto& row : rows) {
        if (!row.ok) ++failures;
        out << g15(row.theta) << "," << g15(row.reflectivity) << "," << g15(row.rho00) << ","
            << g15(row.rho11) << "," << g15(row.rho22) << "," << g15(row.q2_minus) << ","
            << g15(row.db) << "," << g15(row.wigner00) << "," << g15(row.fidelity_ideal) << ","
            << row.status << "\n";
    }
    return failures;
}

namespace {

// Deliberately corrupted recurrence for selftest fault injection.
std::vector<double> corrupted_hermite(int max_n, double q) {
    std::vector<double> psi(static_cast<std::size_t>(max_n) + 1);
    psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * q * q);
    if (max_n >= 1) psi[1] = std::sqrt(2.0) * q * psi[0];
    for (int n = 1; n < max_n; ++n)
        psi[n + 1] = std::sqrt(2.0 / (n + 1.0)) * q * psi[n] -
                     1.01 * std::sqrt(n / (n + 1.0)) * psi[n - 1];
    return psi;
}

struct HermiteOverrideGuard {
    explicit HermiteOverrideGuard(detail::HermiteFn fn) { detail::hermite_override = fn; }
    ~HermiteOverrideGuard() { detail::hermite_override = nullptr; }
};

} // namespace

bool run_selftest(std::ostream& out, const std::string& fault) {
    if (!fault.empty() && fault != "hermite")
        throw config_error("selftest: unknown fault '" + fault + "'");
    HermiteOverrideGuard guard(fault == "hermite" ? &corrupted_hermite : nullptr);

    bool all_ok = true;
    auto check = [&](const char* name, auto&& body) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = body(detail);
        } catch (const std::exception& err) {
            detail = err.what();
        }
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        out << (ok ? "[ ok ]" : "[FAIL]") << " " << name << " (" << ms << " ms)";
        if (!ok && !detail.empty()) out << ": " << detail;
        out << "\n";
        all_ok = all_ok && ok;
    };

    check("beam-splitter unitarity", [](std::string& detail) {
        FockCutoff cutoff(10);
        std::mt19937_64 engine(7);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            double r = i < 3 ? i / 2.0 : rng::uniform01(engine);
            CMatrix u = beam_splitter_unitary(BeamSplitterSetting::from_reflectivity(r), cutoff);
            worst = std::max(worst,
                             (u.adjoint() * u - CMatrix::Identity(100, 100)).cwiseAbs().maxCoeff());
        }
        detail = "max deviation " + g17(worst);
        return worst < 1e-9;
    });

    check("loss-channel completeness", [](std::string& detail) {
        FockCutoff cutoff(12);
        double worst = 0.0;
        for (double eta : {0.0, 0.3, 0.55, 0.9, 1.0}) {
            auto kraus = loss_kraus_operators(LossChannel(eta), cutoff);
            CMatrix sum = CMatrix::Zero(12, 12);
            for (const auto& a : kraus) sum += a.adjoint() * a;
            worst = std::max(worst, (sum - CMatrix::Identity(12, 12)).cwiseAbs().maxCoeff());
        }
        detail = "max deviation " + g17(worst);
        return worst < 1e-9;
    });

    check("loss-inversion identity", [](std::string& detail) {
        FockCutoff cutoff(18);
        double worst = 0.0;
        for (double lambda : {0.05, 0.1, 0.2}) {
            DensityMatrix pure = squeezed_vacuum(SqueezingParameter(lambda), cutoff);
            for (int k = 1; k <= 10; ++k) {
                const double eta = 0.1 * k;
                DensityMatrix lossy = loss_apply(pure, LossChannel(eta));
                VarianceExtremes ext = variance_extremes(lossy);
                const double estimate = efficiency_squeezed(ext.q2_plus(), ext.q2_minus());
                worst = std::max(worst, std::abs(estimate - eta));
            }
        }
        detail = "max |eta error| " + g17(worst);
        return worst < 1e-9;
    });

    check("quadrature pdf moments", [](std::string& detail) {
        FockCutoff cutoff(10);
        std::vector<double> grid;
        for (double q = -8.0; q <= 8.0 + 1e-12; q += 0.005) grid.push_back(q);
        double worst = 0.0;
        for (int n = 0; n <= 5; ++n) {
            DensityMatrix fock = DensityMatrix::fock_state(n, cutoff);
            for (double phi : {0.0, 0.7, 2.1}) {
                std::vector<double> pdf = quadrature_pdf(fock, phi, grid);
                double m1 = 0.0, m2 = 0.0, norm = 0.0;
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    const double w = (i == 0 || i + 1 == grid.size()) ? 0.5 : 1.0;
                    norm += w * pdf[i];
                    m1 += w * grid[i] * pdf[i];
                    m2 += w * grid[i] * grid[i] * pdf[i];
                }
                const double variance = m2 / norm - (m1 / norm) * (m1 / norm);
                worst = std::max(worst, std::abs(variance - (2.0 * n + 1.0) / 2.0));
            }
        }
        detail = "max |variance error| " + g17(worst);
        return worst < 1e-6;
    });

    check("maxlik monotonicity", [](std::string& detail) {
        FockCutoff cutoff(10);
        DensityMatrix squeezed = squeezed_vacuum(SqueezingParameter(0.15), cutoff);
        PhaseTrajectory trajectory = PhaseTrajectory::linear_sweep(0.0, 0.37, 20);
        QuadratureDataset ds =
            sample_quadratures(squeezed, trajectory, AcquisitionConfig{20, 500, 12345, 4000});
        ds = calibrate_scale(std::move(ds));
        std::vector<WindowVariance> wv = window_variances(ds);
        VarianceFit fit = fit_variance_law(wv);
        std::vector<PhasedSample> samples =
            fit.phase_sensitive() ? assign_phases(ds, fit) : assign_phases_uniform(ds);
        ReconstructionSettings settings;
        settings.max_iterations = 300;
        settings.log_likelihood_tolerance = 1e-12;
        ReconstructedState rec = maxlik_reconstruct(samples, settings);
        double worst_drop = 0.0;
        for (std::size_t k = 1; k < rec.log_likelihood_trace.size(); ++k)
            worst_drop = std::min(worst_drop, rec.log_likelihood_trace[k] -
                                                  rec.log_likelihood_trace[k - 1]);
        detail = "worst log-likelihood step " + g17(worst_drop);
        return worst_drop > -1e-9;
    });

    return all_ok;
}

} // namespace heraldsim
