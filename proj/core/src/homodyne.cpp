#include "heraldsim/homodyne.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "heraldsim/random.hpp"

namespace heraldsim {

namespace detail {
HermiteFn hermite_override = nullptr;
}

PhaseModel phase_model_from_string(const std::string& name) {
    if (name == "fixed") return PhaseModel::fixed;
    if (name == "linear-sweep") return PhaseModel::linear_sweep;
    if (name == "random-walk") return PhaseModel::random_walk;
    throw config_error("phase_model: unknown model '" + name + "'");
}

std::string to_string(PhaseModel model) {
    switch (model) {
        case PhaseModel::fixed: return "fixed";
        case PhaseModel::linear_sweep: return "linear-sweep";
        case PhaseModel::random_walk: return "random-walk";
    }
    return "fixed";
}

PhaseTrajectory PhaseTrajectory::fixed(double phi, int windows) {
    if (windows <= 0) throw config_error("windows: must be positive");
    return PhaseTrajectory{std::vector<double>(static_cast<std::size_t>(windows), phi)};
}

PhaseTrajectory PhaseTrajectory::linear_sweep(double start, double increment, int windows) {
    if (windows <= 0) throw config_error("windows: must be positive");
    PhaseTrajectory t;
    t.phases.resize(static_cast<std::size_t>(windows));
    for (int w = 0; w < windows; ++w) t.phases[w] = start + increment * w;
    return t;
}

PhaseTrajectory PhaseTrajectory::random_walk(double start, double sigma, int windows,
                                             std::uint64_t seed) {
    if (windows <= 0) throw config_error("windows: must be positive");
    if (!(sigma >= 0.0)) throw config_error("phase_sigma: must be nonnegative");
    PhaseTrajectory t;
    t.phases.resize(static_cast<std::size_t>(windows));
    std::mt19937_64 engine(seed);
    double phi = start;
    for (int w = 0; w < windows; ++w) {
        t.phases[w] = phi;
        phi += sigma * rng::gaussian(engine);
    }
    return t;
}

std::vector<double> hermite_functions(int max_n, double q) {
    std::vector<double> psi(static_cast<std::size_t>(max_n) + 1);
    psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * q * q);
    if (max_n >= 1) psi[1] = std::sqrt(2.0) * q * psi[0];
    for (int n = 1; n < max_n; ++n)
        psi[n + 1] = std::sqrt(2.0 / (n + 1.0)) * q * psi[n] -
                     std::sqrt(n / (n + 1.0)) * psi[n - 1];
    return psi;
}

std::vector<double> quadrature_pdf(const DensityMatrix& rho, double phi,
                                   std::span<const double> q_grid) {
    const int d = rho.dim();
    if (q_grid.empty()) throw config_error("quadrature_pdf: empty grid");
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        if (!std::isfinite(q_grid[i])) throw config_error("quadrature_pdf: non-finite grid value");
        if (i > 0 && !(q_grid[i] > q_grid[i - 1]))
            throw config_error("quadrature_pdf: grid must be strictly increasing");
    }

    auto eval = detail::hermite_override ? detail::hermite_override : &hermite_functions;
    std::vector<Complex> phase(static_cast<std::size_t>(d));
    for (int n = 0; n < d; ++n) phase[n] = std::exp(Complex(0.0, -n * phi));

    std::vector<double> pdf(q_grid.size());
    CVector w(d);
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        std::vector<double> psi = eval(d - 1, q_grid[i]);
        for (int n = 0; n < d; ++n) w(n) = psi[n] * phase[n];
        // w_n = psi_n e^{-in phi}, so w† rho w = sum_{nm} rho_{nm} psi psi e^{i(n-m)phi}
        pdf[i] = w.dot(rho.matrix() * w).real();
    }
    return pdf;
}

namespace {

struct SamplingGrid {
    std::vector<double> q;
    double step = 0.0;
};

// Default [-6, 6] at 0.01 spacing, widened until the pdf normalizes to 1e-6.
SamplingGrid make_sampling_grid(const DensityMatrix& rho) {
    for (double half = 6.0; half <= 30.0; half += 2.0) {
        const int points = static_cast<int>(std::lround(2.0 * half / 0.01)) + 1;
        SamplingGrid grid;
        grid.q.resize(static_cast<std::size_t>(points));
        grid.step = 2.0 * half / (points - 1);
        for (int i = 0; i < points; ++i) grid.q[i] = -half + grid.step * i;
        std::vector<double> pdf = quadrature_pdf(rho, 0.0, grid.q);
        double integral = 0.0;
        for (int i = 1; i < points; ++i) integral += 0.5 * (pdf[i - 1] + pdf[i]) * grid.step;
        if (std::abs(integral - 1.0) < 1e-6) return grid;
    }
    throw numeric_error("sampling grid: pdf does not normalize within [-30, 30]; "
                        "state support exceeds the sampling bound");
}

void draw_from_pdf(const std::vector<double>& pdf, const SamplingGrid& grid,
                   std::mt19937_64& engine, std::vector<double>& out, int count) {
    const std::size_t cells = pdf.size() - 1;
    std::vector<double> cum(pdf.size(), 0.0);
    for (std::size_t i = 1; i < pdf.size(); ++i)
        cum[i] = cum[i - 1] + 0.5 * (pdf[i - 1] + pdf[i]) * grid.step;
    const double total = cum.back();
    if (!(total > 0.0)) throw numeric_error("sampling: degenerate pdf");

    out.reserve(out.size() + static_cast<std::size_t>(count));
    for (int s = 0; s < count; ++s) {
        const double target = rng::uniform01(engine) * total;
        auto it = std::upper_bound(cum.begin(), cum.end(), target);
        auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - cum.begin()));
        std::size_t cell = std::min(cells - 1, idx - 1);
        const double mass = cum[cell + 1] - cum[cell];
        const double frac = mass > 0.0 ? (target - cum[cell]) / mass : 0.5;
        out.push_back(grid.q[cell] + frac * grid.step);
    }
}

} // namespace

QuadratureDataset sample_quadratures(const DensityMatrix& rho, const PhaseTrajectory& trajectory,
                                     const AcquisitionConfig& acq) {
    acq.validate();
    if (static_cast<int>(trajectory.phases.size()) != acq.windows)
        throw config_error("trajectory length must equal window count");

    SamplingGrid grid = make_sampling_grid(rho);

    QuadratureDataset ds;
    ds.windows.resize(static_cast<std::size_t>(acq.windows));
    for (int w = 0; w < acq.windows; ++w) {
        std::vector<double> pdf = quadrature_pdf(rho, trajectory.phases[w], grid.q);
        std::mt19937_64 engine(rng::derive_seed(acq.rng_seed, static_cast<std::uint64_t>(w)));
        draw_from_pdf(pdf, grid, engine, ds.windows[w], acq.samples_per_window);
    }

    if (acq.vacuum_samples > 0) {
        DensityMatrix vac = DensityMatrix::vacuum(rho.cutoff());
        SamplingGrid vgrid = make_sampling_grid(vac);
        std::vector<double> pdf = quadrature_pdf(vac, 0.0, vgrid.q);
        std::mt19937_64 engine(
            rng::derive_seed(acq.rng_seed, static_cast<std::uint64_t>(acq.windows)));
        draw_from_pdf(pdf, vgrid, engine, ds.vacuum_calibration, acq.vacuum_samples);
    }

    ds.scale = 1.0;
    ds.calibrated = false;
    ds.metadata["seed"] = std::to_string(acq.rng_seed);
    ds.metadata["windows"] = std::to_string(acq.windows);
    ds.metadata["samples_per_window"] = std::to_string(acq.samples_per_window);
    ds.metadata["vacuum_samples"] = std::to_string(acq.vacuum_samples);
    ds.metadata["scale"] = "1";
    ds.metadata["calibrated"] = "false";
    return ds;
}

namespace {

double sample_variance(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) throw data_error("variance: needs at least 2 samples");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(n - 1);
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

} // namespace

QuadratureDataset calibrate_scale(QuadratureDataset dataset) {
    if (dataset.vacuum_calibration.empty())
        throw data_error("calibrate: vacuum calibration set is empty");
    double var = sample_variance(dataset.vacuum_calibration);
    if (!(var > 0.0)) throw data_error("calibrate: vacuum calibration has zero variance");
    const double s = std::sqrt(0.5 / var);
    for (auto& window : dataset.windows)
        for (auto& q : window) q *= s;
    for (auto& q : dataset.vacuum_calibration) q *= s;
    dataset.scale *= s;
    dataset.calibrated = true;
    dataset.metadata["scale"] = format_double(dataset.scale);
    dataset.metadata["calibrated"] = "true";
    return dataset;
}

void write_dataset(const QuadratureDataset& dataset, const std::filesystem::path& signal_file,
                   const std::filesystem::path& vacuum_file) {
    auto write_file = [&dataset](const std::filesystem::path& path, bool vacuum) {
        std::ofstream out(path);
        if (!out) throw data_error("cannot open for writing: " + path.string());
        for (const auto& [key, value] : dataset.metadata)
            out << "# " << key << "=" << value << "\n";
        char buf[64];
        if (vacuum) {
            for (double q : dataset.vacuum_calibration) {
                std::snprintf(buf, sizeof(buf), "-1\t%.17g\n", q);
                out << buf;
            }
        } else {
            for (std::size_t w = 0; w < dataset.windows.size(); ++w) {
                for (double q : dataset.windows[w]) {
                    std::snprintf(buf, sizeof(buf), "%zu\t%.17g\n", w, q);
                    out << buf;
                }
            }
        }
        if (!out) throw data_error("write failed: " + path.string());
    };
    write_file(signal_file, false);
    write_file(vacuum_file, true);
}

namespace {

void parse_sample_file(const std::filesystem::path& path, QuadratureDataset& ds, bool vacuum) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open dataset: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    std::size_t samples = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            std::size_t start = body.find_first_not_of(' ');
            if (start == std::string::npos) continue;
            body = body.substr(start);
            std::size_t eq = body.find('=');
            if (eq == std::string::npos)
                throw data_error(path.string() + ":" + std::to_string(line_no) +
                                 ": malformed header line");
            if (!vacuum) ds.metadata[body.substr(0, eq)] = body.substr(eq + 1);
            continue;
        }
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw data_error(path.string() + ":" + std::to_string(line_no) +
                             ": expected window_index<TAB>value");
        long index = 0;
        double value = 0.0;
        try {
            index = std::stol(line.substr(0, tab));
            std::size_t pos = 0;
            std::string tail = line.substr(tab + 1);
            value = std::stod(tail, &pos);
            if (pos != tail.size())
                throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw data_error(path.string() + ":" + std::to_string(line_no) +
                             ": malformed sample line");
        }
        if (!std::isfinite(value))
            throw data_error(path.string() + ":" + std::to_string(line_no) + ": non-finite sample");
        if (vacuum) {
            if (index != -1)
                throw data_error(path.string() + ":" + std::to_string(line_no) +
                                 ": vacuum file requires window_index -1");
            ds.vacuum_calibration.push_back(value);
        } else {
            if (index < 0)
                throw data_error(path.string() + ":" + std::to_string(line_no) +
                                 ": negative window index in signal file");
            if (static_cast<std::size_t>(index) >= ds.windows.size())
                ds.windows.resize(static_cast<std::size_t>(index) + 1);
            ds.windows[static_cast<std::size_t>(index)].push_back(value);
        }
        ++samples;
    }
    if (!vacuum && samples == 0) throw data_error(path.string() + ": no samples");
}

} // namespace

QuadratureDataset read_dataset(const std::filesystem::path& signal_file,
                               const std::filesystem::path& vacuum_file) {
    QuadratureDataset ds;
    parse_sample_file(signal_file, ds, false);
    if (!vacuum_file.empty() && std::filesystem::exists(vacuum_file))
        parse_sample_file(vacuum_file, ds, true);
    auto it = ds.metadata.find("scale");
    ds.scale = it != ds.metadata.end() ? std::stod(it->second) : 1.0;
    it = ds.metadata.find("calibrated");
    ds.calibrated = it != ds.metadata.end() && it->second == "true";
    if (!ds.calibrated && ds.vacuum_calibration.empty())
        throw data_error(signal_file.string() + ": raw dataset has no vacuum calibration samples");
    return ds;
}

} // namespace heraldsim
