#pragma once

// Shared test helpers and independent oracles. Everything here is test-only
// and deliberately avoids the library's own computational paths where it
// serves as an oracle (matrix exponentials, direct quadrature, Fourier-slice
// Wigner transform).

#include <complex>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "heraldsim/fock.hpp"
#include "heraldsim/homodyne.hpp"
#include "heraldsim/random.hpp"

namespace testsupport {

using heraldsim::CMatrix;
using heraldsim::Complex;
using heraldsim::CVector;

inline CMatrix random_density(int dim, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    auto draw = [&] { return heraldsim::rng::gaussian(engine); };
    CMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = Complex(draw(), draw());
    CMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return rho;
}

// Trapezoid integral of f sampled on a uniform grid.
inline double trapezoid(const std::vector<double>& grid, const std::vector<double>& f) {
    double acc = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        acc += 0.5 * (f[i] + f[i - 1]) * (grid[i] - grid[i - 1]);
    return acc;
}

inline std::vector<double> uniform_grid(double lo, double hi, int points) {
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / (points - 1);
    return grid;
}

struct Moments {
    double norm = 0.0;
    double mean = 0.0;
    double variance = 0.0;
};

inline Moments pdf_moments(const std::vector<double>& grid, const std::vector<double>& pdf) {
    std::vector<double> f1(grid.size()), f2(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        f1[i] = grid[i] * pdf[i];
        f2[i] = grid[i] * grid[i] * pdf[i];
    }
    Moments m;
    m.norm = trapezoid(grid, pdf);
    m.mean = trapezoid(grid, f1) / m.norm;
    m.variance = trapezoid(grid, f2) / m.norm - m.mean * m.mean;
    return m;
}

// Kolmogorov-Smirnov distance between samples and a pdf given on a grid.
inline double ks_distance(std::vector<double> samples, const std::vector<double>& grid,
                          const std::vector<double>& pdf) {
    std::sort(samples.begin(), samples.end());
    std::vector<double> cdf(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i)
        cdf[i] = cdf[i - 1] + 0.5 * (pdf[i] + pdf[i - 1]) * (grid[i] - grid[i - 1]);
    const double total = cdf.back();
    double worst = 0.0;
    const double n = static_cast<double>(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        auto it = std::lower_bound(grid.begin(), grid.end(), samples[k]);
        std::size_t idx = std::min<std::size_t>(grid.size() - 1, it - grid.begin());
        const double model = cdf[idx] / total;
        worst = std::max(worst, std::abs(model - (k + 1) / n));
        worst = std::max(worst, std::abs(model - k / n));
    }
    return worst;
}

// Oracle: two-mode squeezed state by exponentiating r(a†b† − ab) in the
// doubled space (flat index n_signal * D + m_trigger).
inline CVector tmsv_by_exponential(double lambda, int dim) {
    heraldsim::FockCutoff cutoff(dim);
    CMatrix a = heraldsim::annihilation_operator(cutoff);
    CMatrix id = CMatrix::Identity(dim, dim);
    CMatrix a_sig = Eigen::kroneckerProduct(a, id);
    CMatrix a_trig = Eigen::kroneckerProduct(id, a);
    const double r = std::atanh(lambda);
    CMatrix gen = r * (a_sig.adjoint() * a_trig.adjoint() - a_sig * a_trig);
    CMatrix u = gen.exp();
    CVector vac = CVector::Zero(dim * dim);
    vac(0) = 1.0;
    return u * vac;
}

// Oracle: beam-splitter unitary by direct exponentiation of the full
// generator xi (a†b − ab†), optionally with a reflected-amplitude phase:
// xi (e^{i phase} a†b − e^{-i phase} ab†).
inline CMatrix beam_splitter_by_exponential(double reflectivity, int dim, double phase = 0.0) {
    heraldsim::FockCutoff cutoff(dim);
    CMatrix a = heraldsim::annihilation_operator(cutoff);
    CMatrix id = CMatrix::Identity(dim, dim);
    CMatrix a_sig = Eigen::kroneckerProduct(a, id);
    CMatrix a_trig = Eigen::kroneckerProduct(id, a);
    const double xi = std::asin(std::sqrt(reflectivity));
    const Complex up = std::exp(Complex(0.0, phase));
    CMatrix gen = xi * (up * a_sig.adjoint() * a_trig - std::conj(up) * a_sig * a_trig.adjoint());
    return gen.exp();
}

// Oracle: W(0,0) from the quadrature marginals alone (Fourier-slice /
// inverse Radon at the origin):
//   chi(k, phi) = Int pr(q|phi) e^{-ikq} dq
//   W(0,0) = (2 pi)^-2 Int_0^pi dphi Int_-inf^inf |k| chi(k, phi) dk
//          = (2 pi)^-2 Int_0^pi dphi 2 Int_0^inf k Re chi(k, phi) dk.
// The k integral uses composite Simpson.
inline double wigner_origin_from_marginals(const heraldsim::DensityMatrix& rho, int n_phi = 16,
                                           int n_k = 7001) {
    const double k_max = 14.0;
    const auto grid = uniform_grid(-7.5, 7.5, 3001);
    const double hk = k_max / (n_k - 1);

    double phi_integral = 0.0;
    for (int pi_idx = 0; pi_idx < n_phi; ++pi_idx) {
        const double phi = (pi_idx + 0.5) * std::numbers::pi / n_phi;
        std::vector<double> pdf = heraldsim::quadrature_pdf(rho, phi, grid);
        double simpson = 0.0;
        for (int ki = 0; ki < n_k; ++ki) {
            const double k = ki * hk;
            std::vector<double> re(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i)
                re[i] = pdf[i] * std::cos(k * grid[i]);
            const double chi_re = trapezoid(grid, re);
            const double weight =
                (ki == 0 || ki == n_k - 1) ? 1.0 : (ki % 2 == 1 ? 4.0 : 2.0);
            simpson += weight * k * chi_re;
        }
        phi_integral += 2.0 * simpson * hk / 3.0 * (std::numbers::pi / n_phi);
    }
    return phi_integral / (4.0 * std::numbers::pi * std::numbers::pi);
}

// Oracle: Wigner value from the position representation,
// W(q,p) = (1/pi) Int <q+x|rho|q-x> e^{2ipx} dx with the e^{i(n-m)phi}
// marginal convention fixing the sign of p.
inline double wigner_by_position_integral(const heraldsim::DensityMatrix& rho, double q, double p) {
    const int points = 4001;
    const auto x_grid = uniform_grid(-8.0, 8.0, points);
    const int d = rho.dim();
    std::vector<double> re(points);
    for (int i = 0; i < points; ++i) {
        const double x = x_grid[i];
        std::vector<double> psi_plus = heraldsim::hermite_functions(d - 1, q + x);
        std::vector<double> psi_minus = heraldsim::hermite_functions(d - 1, q - x);
        Complex kernel(0.0, 0.0);
        for (int n = 0; n < d; ++n)
            for (int m = 0; m < d; ++m) kernel += rho.matrix()(n, m) * psi_plus[n] * psi_minus[m];
        const Complex phase = std::exp(Complex(0.0, 2.0 * p * x));
        re[i] = (kernel * phase).real();
    }
    return trapezoid(x_grid, re) / std::numbers::pi;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace testsupport
