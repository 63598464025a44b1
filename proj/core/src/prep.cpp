#include "heraldsim/prep.hpp"

namespace heraldsim {

namespace {

double binomial(int n, int k) {
    double result = 1.0;
    for (int j = 1; j <= k; ++j) result *= static_cast<double>(n - k + j) / j;
    return result;
}

} // namespace

std::vector<CMatrix> loss_kraus_operators(const LossChannel& channel, FockCutoff cutoff) {
    const int d = cutoff.dim();
    const double eta = channel.eta();
    std::vector<CMatrix> kraus;
    kraus.reserve(d);
    for (int k = 0; k < d; ++k) {
        CMatrix a = CMatrix::Zero(d, d);
        for (int n = k; n < d; ++n) {
            double weight = binomial(n, k) * std::pow(eta, n - k) * std::pow(1.0 - eta, k);
            a(n - k, n) = std::sqrt(weight);
        }
        kraus.push_back(std::move(a));
    }
    return kraus;
}

DensityMatrix loss_apply(const DensityMatrix& rho, const LossChannel& channel) {
    if (channel.eta() == 1.0) return rho;
    auto kraus = loss_kraus_operators(channel, rho.cutoff());
    CMatrix out = CMatrix::Zero(rho.dim(), rho.dim());
    for (const auto& a : kraus) out += a * rho.matrix() * a.adjoint();
    return DensityMatrix::normalized(std::move(out));
}

CMatrix click_povm(const DetectorModel& detector, FockCutoff cutoff) {
    detector.validate();
    const int d = cutoff.dim();
    CMatrix povm = CMatrix::Zero(d, d);
    double no_click = 1.0 - detector.p_dark;
    double miss = 1.0;
    for (int n = 0; n < d; ++n) {
        povm(n, n) = 1.0 - no_click * miss;
        miss *= 1.0 - detector.eta_t;
    }
    return povm;
}

HeraldedState herald_signal(const HeraldConfig& config, HeraldMethod method) {
    config.detector.validate();
    const FockCutoff cutoff = config.cutoff;
    const int d = cutoff.dim();

    TwoModeState tmsv = two_mode_squeezed_state(config.lambda, cutoff);
    CMatrix u = beam_splitter_unitary(config.setting, cutoff);
    CMatrix povm = click_povm(config.detector, cutoff);

    CMatrix unnormalized = CMatrix::Zero(d, d);
    double p_click = 0.0;

    if (method == HeraldMethod::pure_path) {
        CVector psi = u * tmsv.vector();
        for (int n = 0; n < d; ++n) {
            for (int np = 0; np < d; ++np) {
                Complex acc(0.0, 0.0);
                for (int m = 0; m < d; ++m)
                    acc += povm(m, m) * psi(n * d + m) * std::conj(psi(np * d + m));
                unnormalized(n, np) = acc;
            }
        }
        p_click = unnormalized.trace().real();
    } else {
        TwoModeState evolved = apply_unitary(TwoModeState::mixed(tmsv.to_density(), cutoff), u);
        const CMatrix& rho2 = evolved.matrix();
        for (int n = 0; n < d; ++n) {
            for (int np = 0; np < d; ++np) {
                Complex acc(0.0, 0.0);
                for (int m = 0; m < d; ++m)
                    acc += povm(m, m) * rho2(n * d + m, np * d + m);
                unnormalized(n, np) = acc;
            }
        }
        p_click = unnormalized.trace().real();
    }

    if (!(p_click >= 1e-15))
        throw config_error("herald impossible: click probability below 1e-15");

    DensityMatrix conditioned = DensityMatrix::normalized(std::move(unnormalized));
    DensityMatrix signal = loss_apply(conditioned, config.signal_loss);
    return HeraldedState{std::move(signal), p_click};
}

CVector squeezed_vacuum_vector(SqueezingParameter lambda, FockCutoff cutoff) {
    lambda.require_fits(cutoff);
    const int d = cutoff.dim();
    const double l = lambda.value();
    CVector psi = CVector::Zero(d);
    // c_{2n} = lambda^n sqrt((2n)!) / (2^n n!), built by ratio recurrence.
    double amp = 1.0;
    psi(0) = amp;
    for (int n = 1; 2 * n < d; ++n) {
        amp *= l * std::sqrt((2.0 * n) * (2.0 * n - 1.0)) / (2.0 * n);
        psi(2 * n) = amp;
    }
    psi /= psi.norm();
    return psi;
}

DensityMatrix squeezed_vacuum(SqueezingParameter lambda, FockCutoff cutoff) {
    return DensityMatrix::from_pure(squeezed_vacuum_vector(lambda, cutoff));
}

DensityMatrix ideal_target_state(const HeraldConfig& config) {
    const double r = config.setting.reflectivity();
    const double w_photon = (1.0 - 2.0 * r) * (1.0 - 2.0 * r);
    const double w_squeezed = 2.0 * r * (1.0 - r);
    const int d = config.cutoff.dim();

    CMatrix mix = CMatrix::Zero(d, d);
    mix(1, 1) = w_photon;
    CVector sv = squeezed_vacuum_vector(config.lambda, config.cutoff);
    mix += w_squeezed * (sv * sv.adjoint());
    return DensityMatrix::normalized(std::move(mix));
}

} // namespace heraldsim
