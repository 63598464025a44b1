#include "heraldsim/fock.hpp"

#include <Eigen/Eigenvalues>

namespace heraldsim {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kTraceTol = 1e-9;
constexpr double kEigenTol = 1e-9;

void check_square(const CMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() < 2)
        throw config_error(std::string(what) + ": matrix must be square with dim >= 2");
}

} // namespace

DensityMatrix::DensityMatrix(CMatrix entries) : m_(std::move(entries)) {
    check_square(m_, "density matrix");
    double herm_dev = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (herm_dev > kHermitianTol)
        throw numeric_error("density matrix: Hermiticity violated by " + std::to_string(herm_dev));
    double trace_dev = std::abs(m_.trace() - Complex(1.0, 0.0));
    if (trace_dev > kTraceTol)
        throw numeric_error("density matrix: trace deviates from 1 by " + std::to_string(trace_dev));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
    double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -kEigenTol)
        throw numeric_error("density matrix: negative eigenvalue " + std::to_string(min_eig));
}

DensityMatrix DensityMatrix::normalized(CMatrix entries) {
    check_square(entries, "density matrix");
    CMatrix sym = 0.5 * (entries + entries.adjoint());
    double tr = sym.trace().real();
    if (!(tr > 0.0)) throw numeric_error("density matrix: nonpositive trace");
    sym /= tr;
    return DensityMatrix(std::move(sym));
}

DensityMatrix DensityMatrix::fock_state(int n, FockCutoff cutoff) {
    if (n < 0 || n >= cutoff.dim())
        throw config_error("fock_state: photon number outside cutoff");
    CMatrix m = CMatrix::Zero(cutoff.dim(), cutoff.dim());
    m(n, n) = 1.0;
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::from_pure(const CVector& psi) {
    double norm = psi.norm();
    if (!(norm > 0.0)) throw numeric_error("from_pure: zero state vector");
    CVector unit = psi / norm;
    return DensityMatrix(unit * unit.adjoint());
}

TwoModeState TwoModeState::pure(CVector psi, FockCutoff cutoff) {
    const int d2 = cutoff.dim() * cutoff.dim();
    if (psi.size() != d2) throw config_error("two-mode state: vector length != D^2");
    if (std::abs(psi.norm() - 1.0) > 1e-9)
        throw numeric_error("two-mode state: norm deviates from 1");
    TwoModeState s(cutoff, true);
    s.psi_ = std::move(psi);
    return s;
}

TwoModeState TwoModeState::mixed(CMatrix rho, FockCutoff cutoff) {
    const int d2 = cutoff.dim() * cutoff.dim();
    if (rho.rows() != d2 || rho.cols() != d2)
        throw config_error("two-mode state: matrix dims != D^2");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
        throw numeric_error("two-mode state: Hermiticity violated");
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > kTraceTol)
        throw numeric_error("two-mode state: trace deviates from 1");
    TwoModeState s(cutoff, false);
    s.rho_ = std::move(rho);
    return s;
}

const CVector& TwoModeState::vector() const {
    if (!is_pure_) throw numeric_error("two-mode state: not a pure state");
    return psi_;
}

const CMatrix& TwoModeState::matrix() const {
    if (is_pure_) throw numeric_error("two-mode state: pure state has no matrix; use to_density()");
    return rho_;
}

CMatrix TwoModeState::to_density() const {
    if (is_pure_) return psi_ * psi_.adjoint();
    return rho_;
}

CMatrix annihilation_operator(FockCutoff cutoff) {
    const int d = cutoff.dim();
    CMatrix a = CMatrix::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

TwoModeState two_mode_squeezed_state(SqueezingParameter lambda, FockCutoff cutoff) {
    lambda.require_fits(cutoff);
    const int d = cutoff.dim();
    CVector psi = CVector::Zero(d * d);
    const double l = lambda.value();
    double prefactor = std::sqrt(1.0 - l * l);
    double amp = prefactor;
    for (int n = 0; n < d; ++n) {
        psi(TwoModeState::flat_index(n, n, cutoff)) = amp;
        amp *= l;
    }
    psi /= psi.norm();
    return TwoModeState::pure(std::move(psi), cutoff);
}

CMatrix beam_splitter_unitary(BeamSplitterSetting setting, FockCutoff cutoff) {
    const int d = cutoff.dim();
    const double xi = setting.mixing_angle();
    CMatrix u = CMatrix::Zero(d * d, d * d);

    // The generator xi (a†b − ab†) conserves n+m; exponentiate each total-photon
    // block through the eigendecomposition of the Hermitian matrix i*G.
    for (int total = 0; total <= 2 * (d - 1); ++total) {
        const int n_lo = std::max(0, total - (d - 1));
        const int n_hi = std::min(total, d - 1);
        const int len = n_hi - n_lo + 1;
        Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(len, len);
        for (int i = 0; i + 1 < len; ++i) {
            const int n = n_lo + i;
            const int m = total - n;
            // a†b : (n, m) -> (n+1, m-1)
            const double amp = xi * std::sqrt(static_cast<double>((n + 1) * m));
            gen(i + 1, i) = amp;
            gen(i, i + 1) = -amp;
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(Complex(0.0, 1.0) * gen.cast<Complex>());
        CMatrix phases = (Complex(0.0, -1.0) * es.eigenvalues().cast<Complex>()).array().exp().matrix().asDiagonal();
        CMatrix block = es.eigenvectors() * phases * es.eigenvectors().adjoint();
        for (int i = 0; i < len; ++i) {
            for (int j = 0; j < len; ++j) {
                const int row = TwoModeState::flat_index(n_lo + i, total - (n_lo + i), cutoff);
                const int col = TwoModeState::flat_index(n_lo + j, total - (n_lo + j), cutoff);
                u(row, col) = block(i, j);
            }
        }
    }
    return u;
}

TwoModeState apply_unitary(const TwoModeState& state, const CMatrix& unitary) {
    const int d2 = state.cutoff().dim() * state.cutoff().dim();
    if (unitary.rows() != d2 || unitary.cols() != d2)
        throw config_error("apply_unitary: dimension mismatch");
    if (state.is_pure()) {
        CVector out = unitary * state.vector();
        return TwoModeState::pure(std::move(out), state.cutoff());
    }
    CMatrix out = unitary * state.matrix() * unitary.adjoint();
    return TwoModeState::mixed(std::move(out), state.cutoff());
}

DensityMatrix partial_trace(const TwoModeState& state, Mode keep) {
    const int d = state.cutoff().dim();
    CMatrix reduced = CMatrix::Zero(d, d);
    if (state.is_pure()) {
        const CVector& psi = state.vector();
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                Complex acc(0.0, 0.0);
                for (int k = 0; k < d; ++k) {
                    if (keep == Mode::signal)
                        acc += psi(i * d + k) * std::conj(psi(j * d + k));
                    else
                        acc += psi(k * d + i) * std::conj(psi(k * d + j));
                }
                reduced(i, j) = acc;
            }
        }
    } else {
        const CMatrix& rho = state.matrix();
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                Complex acc(0.0, 0.0);
                for (int k = 0; k < d; ++k) {
                    if (keep == Mode::signal)
                        acc += rho(i * d + k, j * d + k);
                    else
                        acc += rho(k * d + i, k * d + j);
                }
                reduced(i, j) = acc;
            }
        }
    }
    return DensityMatrix::normalized(std::move(reduced));
}

DensityMatrix phase_rotate(const DensityMatrix& rho, double phi) {
    const int d = rho.dim();
    CMatrix out(d, d);
    for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m)
            out(n, m) = rho.matrix()(n, m) * std::exp(Complex(0.0, (n - m) * phi));
    return DensityMatrix(std::move(out));
}

double mean_photon_number(const DensityMatrix& rho) {
    double mean = 0.0;
    for (int n = 0; n < rho.dim(); ++n) mean += n * rho.population(n);
    return mean;
}

double mean_total_photons(const TwoModeState& state) {
    const int d = state.cutoff().dim();
    double mean = 0.0;
    if (state.is_pure()) {
        const CVector& psi = state.vector();
        for (int n = 0; n < d; ++n)
            for (int m = 0; m < d; ++m)
                mean += (n + m) * std::norm(psi(n * d + m));
    } else {
        const CMatrix& rho = state.matrix();
        for (int n = 0; n < d; ++n)
            for (int m = 0; m < d; ++m)
                mean += (n + m) * rho(n * d + m, n * d + m).real();
    }
    return mean;
}

} // namespace heraldsim
