#include "heraldsim/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>

namespace heraldsim {

namespace {

constexpr double kPi = std::numbers::pi;

// W contribution of |n><n+k| at one phase-space point, summed over n with the
// state's coherences: S_k = sum_n rho(n, n+k) (-1)^n sqrt(n!/(n+k)!) L_n^k(x).
Eigen::MatrixXd pair_coefficients(int dim) {
    Eigen::MatrixXd coef(dim, dim);  // coef(n, k), k = m - n
    for (int n = 0; n < dim; ++n) {
        for (int k = 0; n + k < dim; ++k) {
            double ratio = 1.0;
            for (int j = n + 1; j <= n + k; ++j) ratio /= static_cast<double>(j);
            coef(n, k) = ((n % 2) ? -1.0 : 1.0) * std::sqrt(ratio);
        }
    }
    return coef;
}

double wigner_point(const CMatrix& rho, const Eigen::MatrixXd& coef, double q, double p) {
    const int d = static_cast<int>(rho.rows());
    const double r2 = q * q + p * p;
    const double x = 2.0 * r2;
    const double envelope = std::exp(-r2) / kPi;
    const Complex alpha = std::sqrt(2.0) * Complex(q, -p);

    double total = 0.0;
    Complex alpha_pow(1.0, 0.0);
    std::vector<double> lag(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        // L_n^k(x) for n = 0 .. d-1-k by the three-term recurrence.
        const int n_max = d - 1 - k;
        lag[0] = 1.0;
        if (n_max >= 1) lag[1] = 1.0 + k - x;
        for (int n = 1; n < n_max; ++n)
            lag[n + 1] = ((2.0 * n + 1.0 + k - x) * lag[n] - (n + k) * lag[n - 1]) / (n + 1.0);

        Complex s(0.0, 0.0);
        for (int n = 0; n + k < d; ++n) s += rho(n, n + k) * coef(n, k) * lag[n];
        if (k == 0)
            total += s.real();
        else
            total += 2.0 * (s * alpha_pow).real();
        alpha_pow *= alpha;
    }
    return envelope * total;
}

double grid_integral(const WignerGrid& grid) {
    const int nq = static_cast<int>(grid.q_axis.size());
    const int np = static_cast<int>(grid.p_axis.size());
    const double dq = (grid.q_axis.back() - grid.q_axis.front()) / (nq - 1);
    const double dp = (grid.p_axis.back() - grid.p_axis.front()) / (np - 1);
    double sum = 0.0;
    for (int i = 0; i < nq; ++i) {
        const double wi = (i == 0 || i == nq - 1) ? 0.5 : 1.0;
        for (int j = 0; j < np; ++j) {
            const double wj = (j == 0 || j == np - 1) ? 0.5 : 1.0;
            sum += wi * wj * grid.values(i, j);
        }
    }
    return sum * dq * dp;
}

WignerGrid compute_grid(const DensityMatrix& rho, const WignerGridSpec& spec) {
    if (spec.nq < 2 || spec.np < 2 || !(spec.q_max > spec.q_min) || !(spec.p_max > spec.p_min))
        throw config_error("wigner: malformed grid spec");
    WignerGrid grid;
    grid.q_axis.resize(static_cast<std::size_t>(spec.nq));
    grid.p_axis.resize(static_cast<std::size_t>(spec.np));
    for (int i = 0; i < spec.nq; ++i)
        grid.q_axis[i] = spec.q_min + (spec.q_max - spec.q_min) * i / (spec.nq - 1);
    for (int j = 0; j < spec.np; ++j)
        grid.p_axis[j] = spec.p_min + (spec.p_max - spec.p_min) * j / (spec.np - 1);
    grid.values.resize(spec.nq, spec.np);
    Eigen::MatrixXd coef = pair_coefficients(rho.dim());
    for (int i = 0; i < spec.nq; ++i)
        for (int j = 0; j < spec.np; ++j)
            grid.values(i, j) = wigner_point(rho.matrix(), coef, grid.q_axis[i], grid.p_axis[j]);
    grid.integral = grid_integral(grid);
    return grid;
}

} // namespace

WignerGrid wigner_function(const DensityMatrix& rho, WignerGridSpec spec) {
    for (int attempt = 0; attempt < 6; ++attempt) {
        WignerGrid grid = compute_grid(rho, spec);
        if (std::abs(grid.integral - 1.0) <= 1e-3) {
            const double min_value = grid.values.minCoeff();
            if (min_value < -1.0 / kPi - 1e-6)
                throw numeric_error("wigner: value below -1/pi: " + std::to_string(min_value));
            return grid;
        }
        const double grow = 1.5;
        const double q_half = 0.5 * (spec.q_max - spec.q_min) * grow;
        const double p_half = 0.5 * (spec.p_max - spec.p_min) * grow;
        const double q_mid = 0.5 * (spec.q_max + spec.q_min);
        const double p_mid = 0.5 * (spec.p_max + spec.p_min);
        spec.q_min = q_mid - q_half;
        spec.q_max = q_mid + q_half;
        spec.p_min = p_mid - p_half;
        spec.p_max = p_mid + p_half;
        spec.nq = static_cast<int>(std::lround((spec.nq - 1) * grow)) + 1;
        spec.np = static_cast<int>(std::lround((spec.np - 1) * grow)) + 1;
        std::cerr << "warning: wigner grid widened to q in [" << spec.q_min << ", " << spec.q_max
                  << "]\n";
    }
    throw numeric_error("wigner: integral check failed after repeated widening");
}

double wigner_origin(const DensityMatrix& rho) {
    double parity = 0.0;
    for (int n = 0; n < rho.dim(); ++n)
        parity += ((n % 2) ? -1.0 : 1.0) * rho.population(n);
    return parity / kPi;
}

std::vector<std::pair<double, double>> wigner_cross_section(const WignerGrid& grid,
                                                            CrossSectionAxis axis) {
    // Slice through the origin; uses the grid row/column nearest to zero.
    auto nearest_zero = [](const std::vector<double>& axis_values) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < axis_values.size(); ++i)
            if (std::abs(axis_values[i]) < std::abs(axis_values[best])) best = i;
        return best;
    };
    std::vector<std::pair<double, double>> slice;
    if (axis == CrossSectionAxis::q_at_p0) {
        const std::size_t j0 = nearest_zero(grid.p_axis);
        slice.reserve(grid.q_axis.size());
        for (std::size_t i = 0; i < grid.q_axis.size(); ++i)
            slice.emplace_back(grid.q_axis[i], grid.values(static_cast<int>(i), static_cast<int>(j0)));
    } else {
        const std::size_t i0 = nearest_zero(grid.q_axis);
        slice.reserve(grid.p_axis.size());
        for (std::size_t j = 0; j < grid.p_axis.size(); ++j)
            slice.emplace_back(grid.p_axis[j], grid.values(static_cast<int>(i0), static_cast<int>(j)));
    }
    return slice;
}

double marginal_variance(const DensityMatrix& rho, double phi) {
    const int d = rho.dim();
    CMatrix a = annihilation_operator(rho.cutoff());
    CMatrix a2 = a * a;
    CMatrix number = CMatrix::Zero(d, d);
    for (int n = 0; n < d; ++n) number(n, n) = static_cast<double>(n);

    const Complex e1 = std::exp(Complex(0.0, -phi));
    const Complex e2 = e1 * e1;
    // Q = (a e^{-i phi} + a† e^{i phi}) / sqrt(2); Q^2 written normal-ordered so
    // the truncated aa† edge never enters.
    const Complex mean_a = (rho.matrix() * a).trace();
    const double m1 = std::sqrt(2.0) * (mean_a * e1).real();
    const Complex mean_a2 = (rho.matrix() * a2).trace();
    const double nbar = (rho.matrix() * number).trace().real();
    const double m2 = (mean_a2 * e2).real() + nbar + 0.5;
    return m2 - m1 * m1;
}

VarianceExtremes variance_extremes(const DensityMatrix& rho) {
    const int d = rho.dim();
    CMatrix a = annihilation_operator(rho.cutoff());
    const Complex g = (rho.matrix() * a).trace();
    const Complex h = (rho.matrix() * a * a).trace();
    double nbar = 0.0;
    for (int n = 0; n < d; ++n) nbar += n * rho.population(n);

    VarianceExtremes ext;
    const Complex c = h - g * g;
    ext.A = 0.5 + nbar - std::norm(g);
    ext.B = std::abs(c);
    ext.phi_max = 0.5 * std::arg(c);
    return ext;
}

double efficiency_single_photon(double variance) {
    if (variance < 0.5)
        std::cerr << "warning: efficiency_single_photon: variance " << variance
                  << " below the vacuum limit; result is negative\n";
    return variance - 0.5;
}

double efficiency_squeezed(double q2_plus, double q2_minus) {
    if (!(q2_plus >= q2_minus && q2_minus > 0.0))
        throw numeric_error("efficiency_squeezed: requires q2_plus >= q2_minus > 0");
    const double denominator = 2.0 * q2_plus + 2.0 * q2_minus - 2.0;
    if (std::abs(denominator) < 1e-12)
        throw numeric_error("efficiency_squeezed: unsqueezed input "
                            "(state indistinguishable from vacuum)");
    const double numerator =
        2.0 * q2_plus + 2.0 * q2_minus - 4.0 * q2_plus * q2_minus - 1.0;
    return numerator / denominator;
}

double squeezing_db(double q2_minus) {
    if (!(q2_minus > 0.0)) throw numeric_error("squeezing_db: variance must be positive");
    return -10.0 * std::log10(q2_minus / 0.5);
}

namespace {

CMatrix hermitian_sqrt(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
    Eigen::VectorXd eigs = es.eigenvalues();
    for (int i = 0; i < eigs.size(); ++i) eigs(i) = std::sqrt(std::max(0.0, eigs(i)));
    return es.eigenvectors() * eigs.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw config_error("fidelity: dimension mismatch");
    CMatrix root = hermitian_sqrt(rho.matrix());
    CMatrix inner = root * sigma.matrix() * root;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (inner + inner.adjoint()),
                                              Eigen::EigenvaluesOnly);
    double sum = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        sum += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
    return std::min(1.0, sum * sum);
}

EfficiencyReport efficiency_report(const DensityMatrix& rho) {
    EfficiencyReport report;
    VarianceExtremes ext = variance_extremes(rho);
    report.q2_plus = ext.q2_plus();
    report.q2_minus = ext.q2_minus();

    double eta1 = efficiency_single_photon(ext.A);
    if (eta1 < 0.0) {
        report.warnings.push_back("eta_single below 0 (clamped)");
        eta1 = 0.0;
    } else if (eta1 > 1.0) {
        report.warnings.push_back("eta_single above 1 (clamped)");
        eta1 = 1.0;
    }
    report.eta_single = eta1;

    try {
        double eta_sq = efficiency_squeezed(report.q2_plus, report.q2_minus);
        if (eta_sq < 0.0) {
            report.warnings.push_back("eta_squeezed below 0 (clamped)");
            eta_sq = 0.0;
        } else if (eta_sq > 1.0) {
            report.warnings.push_back("eta_squeezed above 1 (clamped)");
            eta_sq = 1.0;
        }
        report.eta_squeezed = eta_sq;
    } catch (const numeric_error& err) {
        report.eta_squeezed = std::numeric_limits<double>::quiet_NaN();
        report.warnings.push_back(std::string("eta_squeezed unavailable: ") + err.what());
    }

    report.squeezing_db = squeezing_db(report.q2_minus);
    return report;
}

} // namespace heraldsim
