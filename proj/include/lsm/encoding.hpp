#pragma once

#include <span>

#include "lsm/spikes.hpp"

namespace lsm {

struct EncodingConfig {
    size_t timesteps = 250;
    double rate_min = 10.0;   // Hz
    double rate_max = 4000.0; // Hz
    double dt = 0.000125;     // s; rate_max * dt must stay <= 1
};

// Min-max normalizes the feature vector across its channels, maps to firing
// rates in [rate_min, rate_max], and draws per-step Bernoulli(rate*dt)
// spikes. Deterministic per seed.
SpikeTrainSet encode_poisson(std::span<const double> features, const EncodingConfig& cfg,
                             uint64_t seed, int label = -1);

} // namespace lsm
