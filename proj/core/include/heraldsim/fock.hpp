#pragma once

#include <cmath>
#include <complex>
#include <Eigen/Dense>

#include "heraldsim/errors.hpp"

namespace heraldsim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Truncated Fock basis {|0>, ..., |D-1>}.
class FockCutoff {
public:
    explicit FockCutoff(int dim) : dim_(dim) {
        if (dim < 2) throw config_error("cutoff: dimension must be >= 2");
    }
    int dim() const { return dim_; }
    friend bool operator==(FockCutoff a, FockCutoff b) { return a.dim_ == b.dim_; }
    friend bool operator!=(FockCutoff a, FockCutoff b) { return !(a == b); }

private:
    int dim_;
};

// lambda = tanh r of the two-mode squeezer, restricted to [0, 1).
class SqueezingParameter {
public:
    explicit SqueezingParameter(double lambda) : lambda_(lambda) {
        if (!(lambda >= 0.0 && lambda < 1.0))
            throw config_error("lambda: squeezing parameter must be in [0, 1)");
    }
    double value() const { return lambda_; }
    double r() const { return std::atanh(lambda_); }

    // Population left outside the cutoff by the |n,n> geometric series: lambda^(2D).
    double truncation_leakage(FockCutoff cutoff) const {
        return std::pow(lambda_, 2.0 * cutoff.dim());
    }
    void require_fits(FockCutoff cutoff) const {
        double leak = truncation_leakage(cutoff);
        if (!(leak < 1e-6))
            throw config_error("lambda: truncation leakage " + std::to_string(leak) +
                               " exceeds 1e-6 at cutoff " + std::to_string(cutoff.dim()));
    }

private:
    double lambda_;
};

// Half-wave-plate angle theta; reflectivity R = cos^2(2 theta).
class BeamSplitterSetting {
public:
    static BeamSplitterSetting from_theta(double theta_rad) {
        if (!std::isfinite(theta_rad)) throw config_error("theta: must be finite");
        return BeamSplitterSetting(theta_rad);
    }
    static BeamSplitterSetting from_reflectivity(double reflectivity) {
        if (!(reflectivity >= 0.0 && reflectivity <= 1.0))
            throw config_error("reflectivity: must be in [0, 1]");
        return BeamSplitterSetting(0.5 * std::acos(std::sqrt(reflectivity)));
    }
    double theta() const { return theta_; }
    double reflectivity() const {
        double c = std::cos(2.0 * theta_);
        return c * c;
    }
    // Mixing angle xi of U = exp(xi (a†b − ab†)); single-photon reflection
    // probability sin^2(xi) = R.
    double mixing_angle() const {
        double root = std::sqrt(std::min(1.0, std::max(0.0, reflectivity())));
        return std::asin(root);
    }

private:
    explicit BeamSplitterSetting(double theta) : theta_(theta) {}
    double theta_;
};

// D x D density matrix over the truncated Fock basis. The constructor enforces
// Hermiticity (1e-10), unit trace (1e-9) and positivity (min eig >= -1e-9).
class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix entries);

    // Symmetrize and trace-normalize, then validate. For matrices that are
    // correct up to numerical dust.
    static DensityMatrix normalized(CMatrix entries);
    static DensityMatrix vacuum(FockCutoff cutoff) { return fock_state(0, cutoff); }
    static DensityMatrix fock_state(int n, FockCutoff cutoff);
    static DensityMatrix from_pure(const CVector& psi);

    const CMatrix& matrix() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }
    FockCutoff cutoff() const { return FockCutoff(dim()); }
    double population(int n) const { return m_(n, n).real(); }

private:
    CMatrix m_;
};

// State of the signal ⊗ trigger pair; flat index k = n_signal * D + m_trigger.
// Either a pure state vector of length D^2 or a D^2 x D^2 density matrix.
class TwoModeState {
public:
    static TwoModeState pure(CVector psi, FockCutoff cutoff);
    static TwoModeState mixed(CMatrix rho, FockCutoff cutoff);

    bool is_pure() const { return is_pure_; }
    FockCutoff cutoff() const { return cutoff_; }
    const CVector& vector() const;
    const CMatrix& matrix() const;
    CMatrix to_density() const;  // psi psi† for pure states

    static int flat_index(int n_signal, int m_trigger, FockCutoff cutoff) {
        return n_signal * cutoff.dim() + m_trigger;
    }

private:
    TwoModeState(FockCutoff cutoff, bool pure) : cutoff_(cutoff), is_pure_(pure) {}
    FockCutoff cutoff_;
    bool is_pure_;
    CVector psi_;
    CMatrix rho_;
};

enum class Mode { signal, trigger };

// a with a[n-1, n] = sqrt(n).
CMatrix annihilation_operator(FockCutoff cutoff);

// sqrt(1-lambda^2) sum_n lambda^n |n,n>, renormalized within the cutoff.
// Rejects lambda whose truncation leakage exceeds 1e-6.
TwoModeState two_mode_squeezed_state(SqueezingParameter lambda, FockCutoff cutoff);

// U = exp(xi (a†b − ab†)) with sin^2(xi) = R, assembled block-by-block in the
// total photon number so it is exactly number-conserving. Reflected amplitude
// convention: U|1,0> = cos(xi)|1,0> − sin(xi)|0,1>.
CMatrix beam_splitter_unitary(BeamSplitterSetting setting, FockCutoff cutoff);

TwoModeState apply_unitary(const TwoModeState& state, const CMatrix& unitary);

DensityMatrix partial_trace(const TwoModeState& state, Mode keep);

// rho'_{nm} = rho_{nm} e^{i(n-m)phi}: rotation of the phase-space reference.
DensityMatrix phase_rotate(const DensityMatrix& rho, double phi);

double mean_photon_number(const DensityMatrix& rho);
double mean_total_photons(const TwoModeState& state);

} // namespace heraldsim
