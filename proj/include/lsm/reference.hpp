#pragma once

#include <vector>

#include "lsm/reservoir.hpp"

namespace lsm {

// Floating-point reference reservoir: identical topology and timing, but
// real-valued weights applied directly (no pulse counters, no pseudo-random
// gating, no quantization) and true geometric leak toward v_reset.
struct RefConfig {
    std::vector<int> layer_sizes = {3, 2, 3};
    int input_channels = 20;

    struct Syn {
        SynapseSource source;
        int target = 0;
        double weight = 0.0;
    };
    std::vector<Syn> synapses;
    std::vector<std::pair<int, int>> feedback_edges;

    double v_threshold = 0.15;
    double v_reset = 0.001;
    double decay = -0.11; // per-step; leak = decay * (v - v_reset)
    int refractory_steps = 1;

    void validate() const;

    // Same topology and the same numeric weight values; the engines then
    // differ by the whole fixed-point/stochastic approximation.
    static RefConfig from_reservoir(const ReservoirConfig& cfg);
};

StateTrace ref_run(const RefConfig& cfg, const SpikeTrainSet& stimulus);

// |fixed - float| in percentage points; accuracies are fractions in [0, 1].
double divergence(double fixed_accuracy, double float_accuracy);

} // namespace lsm
