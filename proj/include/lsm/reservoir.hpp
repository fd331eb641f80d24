#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "lsm/lfsr.hpp"
#include "lsm/neuron.hpp"
#include "lsm/spikes.hpp"
#include "lsm/trace.hpp"

namespace lsm {

struct SynapseSource {
    bool is_input = false;
    int index = 0; // input channel or neuron id

    static SynapseSource input(int channel) { return {true, channel}; }
    static SynapseSource neuron(int id) { return {false, id}; }
    bool operator==(const SynapseSource&) const = default;
};

struct SynapseSpec {
    SynapseSource source;
    int target = 0;
    SynapseConfig synapse;
};

struct LfsrConfig {
    uint8_t seed = 1;
    std::vector<int> taps = {6, 5};
};

struct ReservoirConfig {
    std::vector<int> layer_sizes = {3, 2, 3};
    int input_channels = 20;
    std::vector<SynapseSpec> synapses;
    std::vector<std::pair<int, int>> feedback_edges; // (source neuron, target neuron), unit delay
    NeuronParams neuron;
    LfsrConfig lfsr;
    double dt = 0.000125;
    uint64_t seed = 1;

    int total_neurons() const;
    void validate() const; // throws ConfigError naming the violated constraint

    // The stock 3x2x3 build: 8 neurons, 16 synapses (exactly two incoming
    // per neuron), input channels 0..2 tapped, and layer-3 -> layer-1
    // feedback through unit-delay registers. Weights are pinned excitatory
    // values; pass draw_random_weights to redraw them from the seed.
    static ReservoirConfig stock(bool draw_random_weights = false);

    static ReservoirConfig load_json(const std::filesystem::path& path);
    void save_json(const std::filesystem::path& path) const;

    // JSON-object text form (the file format's payload), so callers can
    // embed a reservoir section in larger configs.
    static ReservoirConfig parse_json_text(const std::string& text, const std::string& origin);
    std::string to_json_text() const;
};

// The synchronous fixed-point engine. One step: draw one LFSR sample per
// synapse (ascending synapse index), evaluate every synapse against its
// source's previous-step spike (external inputs are read in the current
// step), accumulate, update every membrane, latch the delay registers.
class Reservoir {
public:
    explicit Reservoir(ReservoirConfig cfg);

    struct StepResult {
        std::vector<uint8_t> spikes;     // one bit per neuron
        std::vector<double> membranes;   // volts after the step
    };

    void reset();
    StepResult step(std::span<const uint8_t> input_bits);
    StateTrace run(const SpikeTrainSet& stimulus); // resets, then steps through

    const ReservoirConfig& config() const { return cfg_; }
    int neurons() const { return n_neurons_; }

    // Raw membrane bit patterns (for bit-determinism checks).
    const std::vector<int32_t>& membrane_raw() const { return v_m_; }

private:
    ReservoirConfig cfg_;
    int n_neurons_ = 0;
    size_t n_syn_ = 0;
    Lfsr6 lfsr_;

    // per-synapse constants (ascending synapse index = config order)
    std::vector<int32_t> syn_weight_;
    std::vector<int32_t> syn_target_count_;
    std::vector<uint8_t> syn_mode_;
    std::vector<int> syn_feedback_slot_; // index into delayed_, or -1
    std::vector<SynapseSource> syn_source_;
    std::vector<int> syn_target_;
    std::vector<std::vector<int>> incoming_; // neuron -> synapse indices

    // state
    std::vector<int32_t> v_m_;
    std::vector<int32_t> refractory_;
    std::vector<int32_t> counters_;
    std::vector<uint8_t> prev_spikes_;
    std::vector<uint8_t> delayed_; // one bit per feedback edge

    // scratch
    std::vector<int32_t> samples_;
    std::vector<uint8_t> src_bits_;
    std::vector<int32_t> new_counters_;
    std::vector<int32_t> contrib_;
    std::vector<int32_t> v_s_;
    std::vector<int32_t> new_v_m_;
    std::vector<int32_t> new_refr_;
    std::vector<uint8_t> spike_bits_;
};

// Mean inter-class distance over mean intra-class distance between the
// flattened traces (all pair means include self-pairs, which makes two
// identical sets come out at exactly 1). Throws DegenerateError when an
// intra-class mean is zero and ShapeError on mixed shapes.
double separation_metric(std::span<const StateTrace> class_a,
                         std::span<const StateTrace> class_b);

} // namespace lsm
