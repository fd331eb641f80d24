#include "lsm/reference.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace lsm {

void RefConfig::validate() const {
    const int n = std::accumulate(layer_sizes.begin(), layer_sizes.end(), 0);
    if (n < 1)
        throw ConfigError("reference: no neurons");
    if (v_reset >= v_threshold)
        throw ConfigError("reference: v_reset must be below v_threshold");
    if (decay <= -1.0 || decay > 0.0)
        throw ConfigError("reference: decay must lie in (-1, 0]");
    for (const Syn& s : synapses) {
        if (s.target < 0 || s.target >= n)
            throw ConfigError("reference: synapse targets unknown neuron " +
                              std::to_string(s.target));
        const int limit = s.source.is_input ? input_channels : n;
        if (s.source.index < 0 || s.source.index >= limit)
            throw ConfigError("reference: synapse reads unknown source");
    }
    for (auto [src, tgt] : feedback_edges)
        if (src < 0 || src >= n || tgt < 0 || tgt >= n)
            throw ConfigError("reference: bad feedback edge");
}

RefConfig RefConfig::from_reservoir(const ReservoirConfig& cfg) {
    RefConfig ref;
    ref.layer_sizes = cfg.layer_sizes;
    ref.input_channels = cfg.input_channels;
    ref.v_threshold = cfg.neuron.v_threshold.to_double();
    ref.v_reset = cfg.neuron.v_reset.to_double();
    ref.decay = cfg.neuron.decay_constant.to_double();
    ref.refractory_steps = cfg.neuron.refractory_steps;
    ref.feedback_edges = cfg.feedback_edges;
    ref.synapses.reserve(cfg.synapses.size());
    for (const SynapseSpec& s : cfg.synapses)
        ref.synapses.push_back({s.source, s.target, s.synapse.weight.to_double()});
    return ref;
}

StateTrace ref_run(const RefConfig& cfg, const SpikeTrainSet& stimulus) {
    cfg.validate();
    if (stimulus.channels != size_t(cfg.input_channels))
        throw ShapeError("reference: stimulus has " + std::to_string(stimulus.channels) +
                         " channels, config has " + std::to_string(cfg.input_channels));

    const int n = std::accumulate(cfg.layer_sizes.begin(), cfg.layer_sizes.end(), 0);
    std::vector<double> v(n, cfg.v_reset);
    std::vector<int> refractory(n, 0);
    std::vector<uint8_t> prev_spikes(n, 0);
    std::vector<uint8_t> delayed(cfg.feedback_edges.size(), 0);
    std::vector<uint8_t> spikes(n, 0);
    std::vector<double> v_s(n, 0.0);

    // synapse -> feedback delay register, mirroring the fixed engine
    std::vector<int> fb_slot(cfg.synapses.size(), -1);
    for (size_t i = 0; i < cfg.synapses.size(); ++i) {
        if (cfg.synapses[i].source.is_input)
            continue;
        for (size_t e = 0; e < cfg.feedback_edges.size(); ++e) {
            if (cfg.feedback_edges[e].first == cfg.synapses[i].source.index &&
                cfg.feedback_edges[e].second == cfg.synapses[i].target) {
                fb_slot[i] = int(e);
                break;
            }
        }
    }

    StateTrace trace(stimulus.timesteps, size_t(n), false);
    for (size_t t = 0; t < stimulus.timesteps; ++t) {
        std::fill(v_s.begin(), v_s.end(), 0.0);
        for (size_t i = 0; i < cfg.synapses.size(); ++i) {
            const RefConfig::Syn& s = cfg.synapses[i];
            uint8_t bit;
            if (s.source.is_input)
                bit = stimulus.at(s.source.index, t);
            else if (fb_slot[i] >= 0)
                bit = delayed[fb_slot[i]];
            else
                bit = prev_spikes[s.source.index];
            if (bit)
                v_s[s.target] += s.weight;
        }
        for (int id = 0; id < n; ++id) {
            if (refractory[id] > 0) {
                --refractory[id];
                spikes[id] = 0;
                continue;
            }
            const double leak = cfg.decay * (v[id] - cfg.v_reset);
            const double candidate = v[id] + v_s[id] + leak;
            if (candidate >= cfg.v_threshold) {
                v[id] = cfg.v_reset;
                refractory[id] = cfg.refractory_steps;
                spikes[id] = 1;
            } else {
                v[id] = candidate;
                spikes[id] = 0;
            }
        }
        for (size_t e = 0; e < delayed.size(); ++e)
            delayed[e] = spikes[cfg.feedback_edges[e].first];
        prev_spikes = spikes;
        for (int id = 0; id < n; ++id)
            trace.set(t, id, v[id]);
    }
    return trace;
}

double divergence(double fixed_accuracy, double float_accuracy) {
    return std::abs(fixed_accuracy - float_accuracy) * 100.0;
}

} // namespace lsm
