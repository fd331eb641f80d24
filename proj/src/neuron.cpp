#include "lsm/neuron.hpp"

#include <cstdlib>
#include <string>

namespace lsm {

void SynapseConfig::validate() const {
    if (!(weight.fmt() == fx::kFix4_3))
        throw ConfigError("synapse weight must be " + fx::kFix4_3.str());
    if (pulse_count_target < 1)
        throw ConfigError("pulse_count_target must be >= 1, got " +
                          std::to_string(pulse_count_target));
}

void NeuronParams::validate() const {
    if (v_reset.raw() >= v_threshold.raw())
        throw ConfigError("v_reset must be below v_threshold");
    const double decay = decay_constant.to_double();
    if (decay <= -1.0 || decay > 0.0)
        throw ConfigError("decay_constant must lie in (-1, 0], got " + std::to_string(decay));
    if (refractory_steps < 0)
        throw ConfigError("refractory_steps must be >= 0");
    if (contribution_shift < 0 || contribution_shift >= int(v_threshold.fmt().total))
        throw ConfigError("contribution_shift out of range");
}

SynapseStepResult synapse_step(const SynapseConfig& cfg, int counter, bool input_spike,
                               fx::Value lfsr_sample, int contribution_shift,
                               fx::Format membrane_fmt) {
    if (input_spike)
        ++counter;
    const int32_t s = lfsr_sample.raw();
    const int32_t w = cfg.weight.raw();
    const bool pass = cfg.compare_mode == CompareMode::Threshold
                          ? std::abs(s) <= std::abs(w)
                          : s == w;
    if (pass && counter >= cfg.pulse_count_target) {
        const fx::Value unit = fx::quantize(1.0, membrane_fmt);
        const fx::Value magnitude = fx::shr(unit, contribution_shift);
        const fx::Value contribution =
            w < 0 ? fx::neg(magnitude) : (w > 0 ? magnitude : fx::Value(0, membrane_fmt));
        return {0, contribution};
    }
    return {counter, fx::Value(0, membrane_fmt)};
}

fx::Value accumulate(std::span<const fx::Value> contributions, fx::Format fmt) {
    fx::Value sum(0, fmt);
    for (const fx::Value& c : contributions)
        sum = fx::add(sum, c);
    return sum;
}

MembraneStepResult membrane_step(const NeuronParams& params, const NeuronState& state,
                                 fx::Value v_s) {
    NeuronState next = state;
    if (state.refractory_remaining > 0) {
        next.refractory_remaining = state.refractory_remaining - 1;
        return {next, false};
    }
    const fx::Value excess = fx::sub(state.v_m, params.v_reset);
    const fx::Value leak = fx::mul_const(excess, params.decay_constant);
    const fx::Value candidate = fx::add(fx::add(state.v_m, v_s), leak);
    if (candidate.raw() >= params.v_threshold.raw()) {
        next.v_m = params.v_reset;
        next.refractory_remaining = params.refractory_steps;
        return {next, true};
    }
    next.v_m = candidate;
    next.refractory_remaining = 0;
    return {next, false};
}

} // namespace lsm
