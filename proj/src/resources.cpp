#include "lsm/resources.hpp"

#include "lsm/errors.hpp"

namespace lsm {

ResourceEstimate estimate(long neurons, long synapses, Design design,
                          const ResourceModel& model) {
    if (neurons < 1)
        throw ConfigError("estimate: need at least one neuron");
    if (synapses < 0)
        throw ConfigError("estimate: synapse count must be >= 0");
    ResourceEstimate e;
    e.neurons = neurons;
    e.synapses = synapses;
    e.design = design;
    e.neuron_slices = model.slices_per_neuron * neurons;
    e.synapse_slices = model.slices_per_synapse * synapses;
    e.slices = e.neuron_slices + e.synapse_slices;
    e.multipliers = design == Design::Proposed ? neurons : neurons + synapses;
    e.device_slices = model.device_slices;
    e.utilization = double(e.slices) / double(model.device_slices);
    return e;
}

std::vector<FitPoint> fit_check(const ResourceModel& model) {
    std::vector<FitPoint> points;
    auto add = [&](std::string name, long expected, long actual) {
        points.push_back({std::move(name), expected, actual, expected == actual});
    };
    add("1 neuron + 2 synapses: slices", 85, estimate(1, 2, Design::Proposed, model).slices);
    add("8 neurons + 16 synapses: slices", 680, estimate(8, 16, Design::Proposed, model).slices);
    add("8 neurons + 16 synapses: multipliers (proposed)", 8,
        estimate(8, 16, Design::Proposed, model).multipliers);
    add("8 neurons + 16 synapses: multipliers (traditional)", 24,
        estimate(8, 16, Design::Traditional, model).multipliers);
    add("100 synapses: synapse slices", 400,
        estimate(1, 100, Design::Proposed, model).synapse_slices);
    return points;
}

} // namespace lsm
