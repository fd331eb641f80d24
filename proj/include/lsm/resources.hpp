#pragma once

#include <string>
#include <vector>

namespace lsm {

enum class Design { Proposed, Traditional };

// Linear slice/multiplier model of the synapse+membrane circuits on the
// target device. The membrane cost is derived from the published
// single-neuron-with-two-synapses figure (85 slices) minus the two-synapse
// share (8 slices); all coefficients can be overridden.
struct ResourceModel {
    long slices_per_neuron = 77;
    long slices_per_synapse = 4;
    long device_slices = 23616;
};

struct ResourceEstimate {
    long neurons = 0;
    long synapses = 0;
    Design design = Design::Proposed;
    long neuron_slices = 0;
    long synapse_slices = 0;
    long slices = 0;
    long multipliers = 0; // Proposed: one per neuron; Traditional: + one per synapse
    long device_slices = 0;
    double utilization = 0.0;
};

ResourceEstimate estimate(long neurons, long synapses, Design design,
                          const ResourceModel& model = {});

struct FitPoint {
    std::string name;
    long expected = 0;
    long actual = 0;
    bool match = false;
};

// Evaluates the model against the four published data points.
std::vector<FitPoint> fit_check(const ResourceModel& model = {});

} // namespace lsm
