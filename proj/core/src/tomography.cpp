#include "heraldsim/tomography.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace heraldsim {

namespace {

double quantile(std::vector<double> sorted, double p) {
    const std::size_t n = sorted.size();
    const double h = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(n - 1, lo + 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

} // namespace

std::vector<WindowVariance> window_variances(const QuadratureDataset& dataset) {
    if (!dataset.calibrated) {
        if (dataset.vacuum_calibration.empty())
            throw data_error("window_variances: raw dataset lacks vacuum calibration");
        throw data_error("window_variances: dataset has not been calibrated");
    }

    std::vector<WindowVariance> out;
    out.reserve(dataset.windows.size());
    for (std::size_t w = 0; w < dataset.windows.size(); ++w) {
        const auto& samples = dataset.windows[w];
        const std::size_t n = samples.size();
        if (n < 2)
            throw data_error("window_variances: window " + std::to_string(w) +
                             " has fewer than 2 samples");
        double mean = 0.0;
        for (double q : samples) mean += q;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double q : samples) ss += (q - mean) * (q - mean);
        const double variance = ss / static_cast<double>(n - 1);
        WindowVariance wv;
        wv.window_index = static_cast<int>(w);
        wv.variance = variance;
        wv.count = static_cast<int>(n);
        wv.sigma_error = variance * std::sqrt(2.0 / static_cast<double>(n));
        out.push_back(wv);
    }
    return out;
}

namespace {

// Centered quantile function of B*cos(U) + sigma*Z (U uniform phase, Z
// standard normal): the window-variance model around its midpoint A. CDF by
// midpoint quadrature over the phase, quantiles by interpolation on a grid.
std::vector<double> drift_noise_quantiles(double b, double sigma,
                                          const std::vector<double>& probs) {
    constexpr int kPhaseNodes = 96;
    constexpr int kGrid = 512;
    const double span = b + (sigma > 0.0 ? 6.0 * sigma : 1e-12);
    std::vector<double> cos_u(kPhaseNodes);
    for (int i = 0; i < kPhaseNodes; ++i)
        cos_u[i] = std::cos((i + 0.5) * std::numbers::pi / kPhaseNodes);

    std::vector<double> grid(kGrid), cdf(kGrid);
    for (int g = 0; g < kGrid; ++g) {
        const double x = -span + 2.0 * span * g / (kGrid - 1);
        grid[g] = x;
        double acc = 0.0;
        if (sigma > 0.0) {
            for (int i = 0; i < kPhaseNodes; ++i)
                acc += 0.5 * std::erfc(-(x - b * cos_u[i]) / (sigma * std::numbers::sqrt2));
        } else {
            for (int i = 0; i < kPhaseNodes; ++i) acc += (x >= b * cos_u[i]) ? 1.0 : 0.0;
        }
        cdf[g] = acc / kPhaseNodes;
    }

    std::vector<double> out(probs.size());
    std::size_t g = 1;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        const double p = probs[k];
        while (g + 1 < static_cast<std::size_t>(kGrid) && cdf[g] < p) ++g;
        const double c0 = cdf[g - 1], c1 = cdf[g];
        const double frac = (c1 > c0) ? std::clamp((p - c0) / (c1 - c0), 0.0, 1.0) : 0.5;
        out[k] = grid[g - 1] + frac * (grid[g] - grid[g - 1]);
    }
    return out;
}

} // namespace

VarianceFit fit_variance_law(const std::vector<WindowVariance>& variances) {
    if (variances.size() < 3)
        throw data_error("fit_variance_law: needs at least 3 windows");

    const std::size_t w = variances.size();
    std::vector<double> values;
    values.reserve(w);
    double sigma2_mean = 0.0;
    for (const auto& wv : variances) {
        values.push_back(wv.variance);
        sigma2_mean += wv.sigma_error * wv.sigma_error;
    }
    sigma2_mean /= static_cast<double>(w);
    const double sigma = std::sqrt(sigma2_mean);
    std::sort(values.begin(), values.end());

    const double q_lo = quantile(values, 0.02);
    const double q_hi = quantile(values, 0.98);
    const double half_width = 0.5 * (q_hi - q_lo);

    double mean_v = 0.0;
    for (double v : values) mean_v += v;
    mean_v /= static_cast<double>(w);

    // Phase-sensitivity decision: the spread of window variances must exceed
    // what the per-window errors alone explain (3-sigma chi^2 test).
    double spread = 0.0;
    for (double v : values) spread += (v - mean_v) * (v - mean_v);
    spread /= static_cast<double>(w - 1);
    const bool sensitive =
        spread > sigma2_mean * (1.0 + 3.0 * std::sqrt(2.0 / static_cast<double>(w - 1)));

    VarianceFit fit;
    fit.phase_offset = 0.0;
    if (!sensitive) {
        fit.A = 0.5 * (q_hi + q_lo);
        fit.B = 0.0;
        return fit;
    }

    // Fit the whole empirical quantile function against the drift+noise
    // model: order statistic k estimates the model quantile at (k+1)/(W+1).
    // A enters as a pure shift, so for each B it is eliminated by matching
    // means; B is found by golden-section on the residual sum of squares.
    std::vector<double> probs(w);
    for (std::size_t k = 0; k < w; ++k)
        probs[k] = (static_cast<double>(k) + 1.0) / (static_cast<double>(w) + 1.0);

    auto objective = [&](double b) {
        std::vector<double> model = drift_noise_quantiles(b, sigma, probs);
        double model_mean = 0.0;
        for (double m : model) model_mean += m;
        model_mean /= static_cast<double>(w);
        const double shift = mean_v - model_mean;
        double sse = 0.0;
        for (std::size_t k = 0; k < w; ++k) {
            const double r = values[k] - (shift + model[k]);
            sse += r * r;
        }
        return std::make_pair(sse, shift);
    };

    const double inv_golden = 0.6180339887498949;
    double lo = 0.0;
    double hi = 2.0 * half_width + 4.0 * sigma;
    double x1 = hi - inv_golden * (hi - lo);
    double x2 = lo + inv_golden * (hi - lo);
    double f1 = objective(x1).first;
    double f2 = objective(x2).first;
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_golden * (hi - lo);
            f1 = objective(x1).first;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_golden * (hi - lo);
            f2 = objective(x2).first;
        }
        if (hi - lo < 1e-10) break;
    }
    const double b_hat = 0.5 * (lo + hi);
    fit.B = std::max(0.0, b_hat);
    fit.A = objective(b_hat).second;
    return fit;
}

std::vector<PhasedSample> assign_phases(const QuadratureDataset& dataset, const VarianceFit& fit,
                                        bool unfold) {
    if (!(fit.B > 0.0))
        throw data_error("assign_phases: phase-insensitive state (B = 0); "
                         "use the phase-average path");
    std::vector<WindowVariance> variances = window_variances(dataset);
    std::vector<PhasedSample> out;
    out.reserve(dataset.total_samples());
    double prev = 0.0, prev2 = 0.0;
    for (std::size_t w = 0; w < dataset.windows.size(); ++w) {
        const double ratio = std::clamp((variances[w].variance - fit.A) / fit.B, -1.0, 1.0);
        double phi = 0.5 * std::acos(ratio);  // [0, pi/2]
        if (unfold && w > 0) {
            // Continuation by linear extrapolation of the previous windows;
            // the folded value and its mirror are indistinguishable to the
            // 2 phi-periodic law, so pick the one closest to the prediction.
            const double predicted = w > 1 ? 2.0 * prev - prev2 : prev;
            const double mirrored = std::numbers::pi - phi;
            if (std::abs(mirrored - predicted) < std::abs(phi - predicted)) phi = mirrored;
        }
        prev2 = prev;
        prev = phi;
        for (double q : dataset.windows[w]) out.push_back(PhasedSample{q, phi});
    }
    return out;
}

std::vector<PhasedSample> assign_phases_uniform(const QuadratureDataset& dataset) {
    const std::size_t w_count = dataset.windows.size();
    if (w_count == 0) throw data_error("assign_phases_uniform: empty dataset");
    std::vector<PhasedSample> out;
    out.reserve(dataset.total_samples());
    for (std::size_t w = 0; w < w_count; ++w) {
        const double phi =
            (static_cast<double>(w) + 0.5) * std::numbers::pi / static_cast<double>(w_count);
        for (double q : dataset.windows[w]) out.push_back(PhasedSample{q, phi});
    }
    return out;
}

CMatrix quadrature_projector(double q, double phi, FockCutoff cutoff) {
    if (!std::isfinite(q) || !std::isfinite(phi))
        throw config_error("quadrature_projector: non-finite input");
    const int d = cutoff.dim();
    auto eval = detail::hermite_override ? detail::hermite_override : &hermite_functions;
    std::vector<double> psi = eval(d - 1, q);
    CVector v(d);
    for (int n = 0; n < d; ++n) v(n) = psi[n] * std::exp(Complex(0.0, -n * phi));
    return v * v.adjoint();
}

namespace {

struct ProjectorBin {
    CVector v;  // projector = v v†
    double count = 0.0;
};

ReconstructedState maxlik_iterate(std::vector<ProjectorBin> bins, double total,
                                  const ReconstructionSettings& settings,
                                  const std::function<void(const CMatrix&)>& observer) {
    const int d = settings.cutoff.dim();
    CMatrix rho = CMatrix::Identity(d, d) / static_cast<double>(d);

    std::vector<double> trace;
    int iterations = 0;
    int skipped = 0;

    for (int iter = 0; iter <= settings.max_iterations; ++iter) {
        // Per-sample log-likelihood of the current state.
        double loglik = 0.0;
        CMatrix r_op = CMatrix::Zero(d, d);
        bool any_bin = false;
        int skipped_now = 0;
        for (const auto& bin : bins) {
            const double prob = bin.v.dot(rho * bin.v).real();
            if (!(prob >= 1e-300)) {
                ++skipped_now;
                continue;
            }
            any_bin = true;
            loglik += bin.count * std::log(prob);
            r_op += (bin.count / prob) * (bin.v * bin.v.adjoint());
        }
        if (!any_bin) throw numeric_error("maxlik: all bins degenerate");
        skipped = skipped_now;
        loglik /= total;
        trace.push_back(loglik);

        if (trace.size() >= 2) {
            const double gain = trace[trace.size() - 1] - trace[trace.size() - 2];
            if (gain < settings.log_likelihood_tolerance) break;
        }
        if (iter == settings.max_iterations) break;

        r_op /= total;
        CMatrix next = r_op * rho * r_op;
        next = 0.5 * (next + next.adjoint().eval());
        const double tr = next.trace().real();
        if (!(tr > 0.0)) throw numeric_error("maxlik: iteration lost trace");
        rho = next / tr;
        ++iterations;
        if (observer) observer(rho);
    }

    return ReconstructedState{DensityMatrix::normalized(rho), iterations, std::move(trace),
                              skipped};
}

} // namespace

ReconstructedState maxlik_reconstruct(std::span<const PhasedSample> samples,
                                      const ReconstructionSettings& settings,
                                      const std::function<void(const CMatrix&)>& observer) {
    settings.validate();
    if (samples.empty()) throw data_error("maxlik: no samples");

    const int d = settings.cutoff.dim();
    const double pi = std::numbers::pi;

    double q_lo = samples[0].q, q_hi = samples[0].q;
    for (const auto& s : samples) {
        q_lo = std::min(q_lo, s.q);
        q_hi = std::max(q_hi, s.q);
    }
    const double pad = 1e-9 * std::max(1.0, std::abs(q_hi) + std::abs(q_lo));
    q_lo -= pad;
    q_hi += pad;
    const double dq = (q_hi - q_lo) / settings.q_bins;
    const double dphi = pi / settings.phase_bins;

    const std::size_t n_cells = static_cast<std::size_t>(settings.q_bins) * settings.phase_bins;
    std::vector<double> counts(n_cells, 0.0);
    std::vector<double> q_sum(n_cells, 0.0);
    std::vector<double> phi_sum(n_cells, 0.0);
    for (const auto& s : samples) {
        int qi = std::clamp(static_cast<int>((s.q - q_lo) / dq), 0, settings.q_bins - 1);
        double phi = std::fmod(s.phi, pi);
        if (phi < 0.0) phi += pi;
        int fi = std::clamp(static_cast<int>(phi / dphi), 0, settings.phase_bins - 1);
        const std::size_t cell = static_cast<std::size_t>(qi) * settings.phase_bins + fi;
        counts[cell] += 1.0;
        q_sum[cell] += s.q;
        phi_sum[cell] += phi;
    }

    std::vector<ProjectorBin> bins;
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        const double c = counts[cell];
        if (c <= 0.0) continue;
        // Centroid binning: the bin is represented at its sample means, which
        // keeps point masses at the phase fold edges where they belong.
        const double q = q_sum[cell] / c;
        const double phi = phi_sum[cell] / c;
        std::vector<double> psi = hermite_functions(d - 1, q);
        CVector v(d);
        for (int n = 0; n < d; ++n) v(n) = psi[n] * std::exp(Complex(0.0, -n * phi));
        bins.push_back(ProjectorBin{std::move(v), c});
    }

    return maxlik_iterate(std::move(bins), static_cast<double>(samples.size()), settings,
                          observer);
}

ReconstructedState maxlik_reconstruct_binned(std::span<const BinnedSample> binned,
                                             const ReconstructionSettings& settings,
                                             const std::function<void(const CMatrix&)>& observer) {
    settings.validate();
    if (binned.empty()) throw data_error("maxlik: no samples");
    const int d = settings.cutoff.dim();
    std::vector<ProjectorBin> bins;
    bins.reserve(binned.size());
    double total = 0.0;
    for (const auto& b : binned) {
        if (!(b.weight >= 0.0)) throw data_error("maxlik: negative bin weight");
        if (b.weight == 0.0) continue;
        std::vector<double> psi = hermite_functions(d - 1, b.q);
        CVector v(d);
        for (int n = 0; n < d; ++n) v(n) = psi[n] * std::exp(Complex(0.0, -n * b.phi));
        bins.push_back(ProjectorBin{std::move(v), b.weight});
        total += b.weight;
    }
    if (bins.empty()) throw data_error("maxlik: all bin weights zero");
    return maxlik_iterate(std::move(bins), total, settings, observer);
}

void write_reconstruction(const ReconstructedState& state, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open for writing: " + path.string());
    char buf[96];
    out << "cutoff=" << state.rho.dim() << "\n";
    out << "iterations=" << state.iterations_used << "\n";
    std::snprintf(buf, sizeof(buf), "final_loglik=%.17g\n", state.final_log_likelihood());
    out << buf;
    const CMatrix& m = state.rho.matrix();
    for (int i = 0; i < state.rho.dim(); ++i) {
        for (int j = 0; j < state.rho.dim(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g%+.17gj", m(i, j).real(), m(i, j).imag());
            out << buf;
            if (j + 1 < state.rho.dim()) out << ",";
        }
        out << "\n";
    }
    if (!out) throw data_error("write failed: " + path.string());
}

DensityMatrix read_reconstruction(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open reconstruction: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    int dim = -1;
    std::vector<std::vector<Complex>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq != std::string::npos && line.find(',') == std::string::npos &&
            line.find('j') == std::string::npos) {
            if (line.substr(0, eq) == "cutoff") dim = std::stoi(line.substr(eq + 1));
            continue;
        }
        std::vector<Complex> row;
        std::size_t pos = 0;
        while (pos < line.size()) {
            std::size_t comma = line.find(',', pos);
            std::string entry = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                            : comma - pos);
            // Format: <real><+/-><imag>j
            std::size_t j_pos = entry.rfind('j');
            if (j_pos == std::string::npos)
                throw data_error(path.string() + ":" + std::to_string(line_no) +
                                 ": missing 'j' suffix in matrix entry");
            try {
                std::size_t consumed = 0;
                double re = std::stod(entry, &consumed);
                double im = std::stod(entry.substr(consumed, j_pos - consumed));
                row.emplace_back(re, im);
            } catch (const std::exception&) {
                throw data_error(path.string() + ":" + std::to_string(line_no) +
                                 ": malformed matrix entry '" + entry + "'");
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw data_error(path.string() + ": no matrix rows");
    const int d = dim > 0 ? dim : static_cast<int>(rows.size());
    if (static_cast<int>(rows.size()) != d)
        throw data_error(path.string() + ": expected " + std::to_string(d) + " matrix rows");
    CMatrix m(d, d);
    for (int i = 0; i < d; ++i) {
        if (static_cast<int>(rows[i].size()) != d)
            throw data_error(path.string() + ": row " + std::to_string(i) + " has " +
                             std::to_string(rows[i].size()) + " entries, expected " +
                             std::to_string(d));
        for (int j = 0; j < d; ++j) m(i, j) = rows[i][j];
    }
    return DensityMatrix(std::move(m));
}

} // namespace heraldsim
