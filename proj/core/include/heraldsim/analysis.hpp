#pragma once

#include <string>
#include <utility>
#include <vector>

#include "heraldsim/fock.hpp"

namespace heraldsim {

struct WignerGridSpec {
    double q_min = -4.0, q_max = 4.0;
    int nq = 161;
    double p_min = -4.0, p_max = 4.0;
    int np = 161;
};

// Convention: integral of W over the plane is 1, vacuum peak 1/pi.
struct WignerGrid {
    std::vector<double> q_axis;
    std::vector<double> p_axis;
    Eigen::MatrixXd values;  // values(i, j) = W(q_axis[i], p_axis[j])
    double integral = 0.0;
};

enum class CrossSectionAxis { q_at_p0, p_at_q0 };

// Fock-basis Wigner synthesis through the associated-Laguerre closed form.
// Widens the grid (with a warning) when the integral check fails.
WignerGrid wigner_function(const DensityMatrix& rho, WignerGridSpec spec = {});

// W(0,0) = (1/pi) sum_n (-1)^n rho_nn (parity expectation).
double wigner_origin(const DensityMatrix& rho);

std::vector<std::pair<double, double>> wigner_cross_section(const WignerGrid& grid,
                                                            CrossSectionAxis axis);

// Var Q_phi computed algebraically from the quadrature operator.
double marginal_variance(const DensityMatrix& rho, double phi);

// Var Q_phi = A + Re((h - g^2) e^{-2 i phi}) with A = 1/2 + <n> - |<a>|^2;
// closed-form extremes of the variance law.
struct VarianceExtremes {
    double A = 0.0;
    double B = 0.0;
    double phi_max = 0.0;  // phase of the variance maximum
    double q2_plus() const { return A + B; }
    double q2_minus() const { return A - B; }
};
VarianceExtremes variance_extremes(const DensityMatrix& rho);

// eta = variance - 1/2 under the model rho = eta |1><1| + (1-eta)|0><0|.
double efficiency_single_photon(double variance);

// Overall efficiency from the deviation of the extreme quadrature variances
// from the minimum uncertainty limit.
double efficiency_squeezed(double q2_plus, double q2_minus);

// -10 log10(q2_minus / 0.5); positive = squeezing below the SQL.
double squeezing_db(double q2_minus);

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

struct EfficiencyReport {
    double eta_single = 0.0;
    double eta_squeezed = 0.0;  // NaN when the state is indistinguishable from vacuum
    double q2_plus = 0.0;
    double q2_minus = 0.0;
    double squeezing_db = 0.0;
    std::vector<std::string> warnings;
};

EfficiencyReport efficiency_report(const DensityMatrix& rho);

} // namespace heraldsim
