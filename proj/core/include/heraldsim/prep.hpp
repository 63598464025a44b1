#pragma once

#include <vector>

#include "heraldsim/fock.hpp"

namespace heraldsim {

// On/off trigger detector: path efficiency and per-window dark-count probability.
struct DetectorModel {
    double eta_t = 1.0;
    double p_dark = 0.0;

    void validate() const {
        if (!(eta_t >= 0.0 && eta_t <= 1.0)) throw config_error("eta_trigger: must be in [0, 1]");
        if (!(p_dark >= 0.0 && p_dark < 1.0)) throw config_error("p_dark: must be in [0, 1)");
    }
};

// Lumped linear loss on the signal path (transmission eta).
class LossChannel {
public:
    explicit LossChannel(double eta) : eta_(eta) {
        if (!(eta >= 0.0 && eta <= 1.0)) throw config_error("eta_signal: must be in [0, 1]");
    }
    double eta() const { return eta_; }

private:
    double eta_;
};

struct HeraldConfig {
    SqueezingParameter lambda;
    BeamSplitterSetting setting;
    DetectorModel detector;
    LossChannel signal_loss;
    FockCutoff cutoff;
};

struct HeraldedState {
    DensityMatrix state;
    double herald_probability = 0.0;
};

// Kraus operators A_k of the photon-loss channel, k = 0 .. D-1.
std::vector<CMatrix> loss_kraus_operators(const LossChannel& channel, FockCutoff cutoff);

// rho -> sum_k A_k rho A_k†.
DensityMatrix loss_apply(const DensityMatrix& rho, const LossChannel& channel);

// Diagonal POVM element of a click: I − (1 − p_dark) sum_n (1 − eta_t)^n |n><n|.
CMatrix click_povm(const DetectorModel& detector, FockCutoff cutoff);

enum class HeraldMethod {
    pure_path,   // state vector through U, then contraction against the POVM
    dense_path   // full two-mode density matrix route (reference)
};

// Conditional preparation: TMSV through the beam splitter, click on the
// trigger port, lumped loss on the surviving signal state.
HeraldedState herald_signal(const HeraldConfig& config, HeraldMethod method = HeraldMethod::pure_path);

// Single-mode squeezed vacuum with the same orientation as the R=1/2 heralded
// state (anti-squeezed position, squeezed momentum).
CVector squeezed_vacuum_vector(SqueezingParameter lambda, FockCutoff cutoff);
DensityMatrix squeezed_vacuum(SqueezingParameter lambda, FockCutoff cutoff);

// Reference state for fidelity reporting across a theta sweep: the weak-pump
// click-branch mixture (1-2R)^2 |1><1| + 2R(1-R) |sv(lambda)><sv(lambda)|,
// normalized. Ideal detector, no loss.
DensityMatrix ideal_target_state(const HeraldConfig& config);

} // namespace heraldsim
