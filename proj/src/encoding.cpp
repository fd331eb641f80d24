#include "lsm/encoding.hpp"

#include <algorithm>
#include <string>

#include "lsm/errors.hpp"
#include "lsm/rng.hpp"

namespace lsm {

SpikeTrainSet encode_poisson(std::span<const double> features, const EncodingConfig& cfg,
                             uint64_t seed, int label) {
    if (cfg.rate_min < 0.0)
        throw ConfigError("encode_poisson: rate_min must be >= 0");
    if (cfg.rate_max < cfg.rate_min)
        throw ConfigError("encode_poisson: rate_max below rate_min");
    if (cfg.rate_max * cfg.dt > 1.0)
        throw ConfigError("encode_poisson: rate_max*dt = " +
                          std::to_string(cfg.rate_max * cfg.dt) +
                          " exceeds one spike per step");
    if (features.empty())
        throw ShapeError("encode_poisson: empty feature vector");

    const double lo = *std::min_element(features.begin(), features.end());
    const double hi = *std::max_element(features.begin(), features.end());
    const double span = hi - lo;

    SpikeTrainSet set(features.size(), cfg.timesteps);
    set.dt = cfg.dt;
    set.label = label;
    set.seed = seed;

    Rng rng(seed);
    for (size_t c = 0; c < features.size(); ++c) {
        const double norm = span > 0.0 ? (features[c] - lo) / span : 0.0;
        const double p = (cfg.rate_min + norm * (cfg.rate_max - cfg.rate_min)) * cfg.dt;
        for (size_t t = 0; t < cfg.timesteps; ++t)
            set.set(c, t, rng.bernoulli(p));
    }
    return set;
}

} // namespace lsm
