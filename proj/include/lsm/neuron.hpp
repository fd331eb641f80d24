#pragma once

#include <span>
#include <vector>

#include "lsm/fxp.hpp"

namespace lsm {

enum class CompareMode { Equality, Threshold };

// One multiplier-less synapse: a pulse counter, the stored weight, and the
// gate that compares the per-step pseudo-random draw against the weight.
struct SynapseConfig {
    fx::Value weight = fx::Value(0, fx::kFix4_3); // sign = excitatory/inhibitory
    int pulse_count_target = 1;
    CompareMode compare_mode = CompareMode::Threshold;

    void validate() const; // throws ConfigError
};

struct NeuronParams {
    fx::Value v_threshold = fx::quantize(0.15, fx::kFix18_12);
    fx::Value v_reset = fx::quantize(0.001, fx::kFix18_12);
    fx::Value decay_constant = fx::quantize(-0.11, fx::kFix18_12);
    int refractory_steps = 1;
    int contribution_shift = 3;

    void validate() const; // throws ConfigError (v_reset < v_threshold, decay in (-1, 0])
};

struct NeuronState {
    fx::Value v_m = fx::quantize(0.001, fx::kFix18_12);
    int refractory_remaining = 0;
    std::vector<int> pulse_counters;
};

struct SynapseStepResult {
    int counter;
    fx::Value contribution; // membrane format; 0 or +/- 2^-shift
};

// One synchronous synapse update. The counter counts the incoming spike; the
// synapse fires when the counter has reached its target and the draw passes
// the weight comparison (Equality: draw == weight; Threshold:
// |draw| <= |weight|). On fire the counter resets and the contribution is
// sign(weight) * 2^-contribution_shift.
SynapseStepResult synapse_step(const SynapseConfig& cfg, int counter, bool input_spike,
                               fx::Value lfsr_sample, int contribution_shift,
                               fx::Format membrane_fmt = fx::kFix18_12);

// Saturating sum of synapse contributions.
fx::Value accumulate(std::span<const fx::Value> contributions,
                     fx::Format fmt = fx::kFix18_12);

struct MembraneStepResult {
    NeuronState state;
    bool spike;
};

// One synchronous membrane update: hold during refractory, otherwise leak
// toward v_reset (one multiply), integrate v_s, and fire + reset when the
// candidate reaches v_threshold.
MembraneStepResult membrane_step(const NeuronParams& params, const NeuronState& state,
                                 fx::Value v_s);

} // namespace lsm
