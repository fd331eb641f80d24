#include "lsm/reservoir.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "lsm/kernels.hpp"
#include "lsm/rng.hpp"

namespace lsm {

using nlohmann::json;

int ReservoirConfig::total_neurons() const {
    return std::accumulate(layer_sizes.begin(), layer_sizes.end(), 0);
}

void ReservoirConfig::validate() const {
    if (layer_sizes.empty())
        throw ConfigError("reservoir: layer_sizes is empty");
    for (int s : layer_sizes)
        if (s < 1)
            throw ConfigError("reservoir: layer sizes must be >= 1");
    if (input_channels < 1)
        throw ConfigError("reservoir: input_channels must be >= 1");
    if (dt <= 0)
        throw ConfigError("reservoir: dt must be positive");
    neuron.validate();

    const int n = total_neurons();
    std::vector<int> incoming(n, 0);
    for (size_t i = 0; i < synapses.size(); ++i) {
        const SynapseSpec& s = synapses[i];
        if (s.target < 0 || s.target >= n)
            throw ConfigError("reservoir: synapse " + std::to_string(i) +
                              " targets unknown neuron " + std::to_string(s.target));
        if (s.source.is_input) {
            if (s.source.index < 0 || s.source.index >= input_channels)
                throw ConfigError("reservoir: synapse " + std::to_string(i) +
                                  " reads unknown input channel " +
                                  std::to_string(s.source.index));
        } else {
            if (s.source.index < 0 || s.source.index >= n)
                throw ConfigError("reservoir: synapse " + std::to_string(i) +
                                  " reads unknown neuron " + std::to_string(s.source.index));
        }
        s.synapse.validate();
        if (std::abs(s.synapse.weight.raw()) > 3)
            throw ConfigError("reservoir: synapse " + std::to_string(i) +
                              " weight outside the +/-0.4 grid");
        ++incoming[s.target];
    }
    for (int id = 0; id < n; ++id)
        if (incoming[id] < 2)
            throw ConfigError("reservoir: neuron " + std::to_string(id) +
                              " has fewer than two incoming synapses");
    for (auto [src, tgt] : feedback_edges) {
        if (src < 0 || src >= n || tgt < 0 || tgt >= n)
            throw ConfigError("reservoir: feedback edge (" + std::to_string(src) + "," +
                              std::to_string(tgt) + ") references unknown neurons");
    }
}

ReservoirConfig ReservoirConfig::stock(bool draw_random_weights) {
    ReservoirConfig cfg;
    auto w = [](double v) { return fx::quantize(v, fx::kFix4_3); };
    auto syn = [&](SynapseSource src, int tgt, double weight) {
        SynapseSpec s;
        s.source = src;
        s.target = tgt;
        s.synapse.weight = w(weight);
        cfg.synapses.push_back(s);
    };
    // layer 1 (0..2): one input tap + one feedback synapse each
    syn(SynapseSource::input(0), 0, 0.375);
    syn(SynapseSource::neuron(5), 0, 0.125);
    syn(SynapseSource::input(1), 1, 0.375);
    syn(SynapseSource::neuron(6), 1, 0.125);
    syn(SynapseSource::input(2), 2, 0.375);
    syn(SynapseSource::neuron(7), 2, 0.125);
    // layer 2 (3..4)
    syn(SynapseSource::neuron(0), 3, 0.375);
    syn(SynapseSource::neuron(1), 3, 0.25);
    syn(SynapseSource::neuron(1), 4, 0.25);
    syn(SynapseSource::neuron(2), 4, 0.375);
    // layer 3 (5..7)
    syn(SynapseSource::neuron(3), 5, 0.375);
    syn(SynapseSource::neuron(4), 5, 0.25);
    syn(SynapseSource::neuron(3), 6, 0.25);
    syn(SynapseSource::neuron(4), 6, 0.375);
    syn(SynapseSource::neuron(3), 7, 0.375);
    syn(SynapseSource::neuron(4), 7, 0.375);
    cfg.feedback_edges = {{5, 0}, {6, 1}, {7, 2}};
    if (draw_random_weights) {
        Rng rng(stage_seed(cfg.seed, "reservoir-weights"));
        for (SynapseSpec& s : cfg.synapses)
            s.synapse.weight = fx::Value(int32_t(rng.uniform_int(-3, 3)), fx::kFix4_3);
    }
    return cfg;
}

namespace {

SynapseSource parse_source(const json& j) {
    const std::string s = j.get<std::string>();
    if (s.rfind("in:", 0) == 0)
        return SynapseSource::input(std::stoi(s.substr(3)));
    if (s.rfind("n:", 0) == 0)
        return SynapseSource::neuron(std::stoi(s.substr(2)));
    throw ConfigError("synapse source '" + s + "' must look like 'in:3' or 'n:5'");
}

std::string source_str(const SynapseSource& s) {
    return (s.is_input ? "in:" : "n:") + std::to_string(s.index);
}

fx::Value parse_weight(const json& j, Rng& rng) {
    if (j.is_string()) {
        if (j.get<std::string>() == "random")
            return fx::Value(int32_t(rng.uniform_int(-3, 3)), fx::kFix4_3);
        throw ConfigError("synapse weight must be a number or \"random\"");
    }
    return fx::quantize(j.get<double>(), fx::kFix4_3);
}

} // namespace

ReservoirConfig ReservoirConfig::load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_json_text(text, path.string());
}

ReservoirConfig ReservoirConfig::parse_json_text(const std::string& text,
                                                 const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError("bad reservoir config " + origin + ": " + e.what());
    }

    ReservoirConfig cfg = ReservoirConfig::stock();
    try {
        if (j.contains("layer_sizes"))
            cfg.layer_sizes = j["layer_sizes"].get<std::vector<int>>();
        if (j.contains("input_channels"))
            cfg.input_channels = j["input_channels"].get<int>();
        if (j.contains("dt"))
            cfg.dt = j["dt"].get<double>();
        if (j.contains("seed"))
            cfg.seed = j["seed"].get<uint64_t>();
        if (j.contains("lfsr")) {
            const json& l = j["lfsr"];
            if (l.contains("seed"))
                cfg.lfsr.seed = uint8_t(l["seed"].get<int>());
            if (l.contains("taps"))
                cfg.lfsr.taps = l["taps"].get<std::vector<int>>();
        }
        if (j.contains("neuron")) {
            const json& njs = j["neuron"];
            fx::Format mem_fmt = fx::kFix18_12;
            if (njs.contains("membrane_format"))
                mem_fmt = fx::Format::parse(njs["membrane_format"].get<std::string>());
            NeuronParams p;
            p.v_threshold = fx::quantize(njs.value("v_threshold", 0.15), mem_fmt);
            p.v_reset = fx::quantize(njs.value("v_reset", 0.001), mem_fmt);
            p.decay_constant = fx::quantize(njs.value("decay_constant", -0.11), mem_fmt);
            p.refractory_steps = njs.value("refractory_steps", 1);
            p.contribution_shift = njs.value("contribution_shift", 3);
            cfg.neuron = p;
        }
        if (j.contains("synapses")) {
            Rng rng(stage_seed(cfg.seed, "reservoir-weights"));
            if (j["synapses"].is_string()) {
                if (j["synapses"].get<std::string>() != "random")
                    throw ConfigError("synapses must be a list or \"random\"");
                cfg.synapses = ReservoirConfig::stock(false).synapses;
                for (SynapseSpec& s : cfg.synapses)
                    s.synapse.weight = fx::Value(int32_t(rng.uniform_int(-3, 3)), fx::kFix4_3);
            } else {
                cfg.synapses.clear();
                for (const json& sj : j["synapses"]) {
                    SynapseSpec s;
                    s.source = parse_source(sj.at("source"));
                    s.target = sj.at("target").get<int>();
                    s.synapse.weight = parse_weight(sj.at("weight"), rng);
                    s.synapse.pulse_count_target = sj.value("pulse_count_target", 1);
                    s.synapse.compare_mode = sj.value("compare_mode", std::string("threshold")) ==
                                                     "equality"
                                                 ? CompareMode::Equality
                                                 : CompareMode::Threshold;
                    cfg.synapses.push_back(s);
                }
            }
        }
        if (j.contains("feedback_edges")) {
            cfg.feedback_edges.clear();
            for (const json& e : j["feedback_edges"])
                cfg.feedback_edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        }
    } catch (const json::exception& e) {
        throw FormatError("bad reservoir config " + origin + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

std::string ReservoirConfig::to_json_text() const {
    json j;
    j["layer_sizes"] = layer_sizes;
    j["input_channels"] = input_channels;
    j["dt"] = dt;
    j["seed"] = seed;
    j["lfsr"] = {{"seed", int(lfsr.seed)}, {"taps", lfsr.taps}};
    j["neuron"] = {{"v_threshold", neuron.v_threshold.to_double()},
                   {"v_reset", neuron.v_reset.to_double()},
                   {"decay_constant", neuron.decay_constant.to_double()},
                   {"refractory_steps", neuron.refractory_steps},
                   {"contribution_shift", neuron.contribution_shift},
                   {"membrane_format", neuron.v_threshold.fmt().str()}};
    json syns = json::array();
    for (const SynapseSpec& s : synapses) {
        syns.push_back({{"source", source_str(s.source)},
                        {"target", s.target},
                        {"weight", s.synapse.weight.to_double()},
                        {"pulse_count_target", s.synapse.pulse_count_target},
                        {"compare_mode", s.synapse.compare_mode == CompareMode::Equality
                                             ? "equality"
                                             : "threshold"}});
    }
    j["synapses"] = syns;
    json edges = json::array();
    for (auto [src, tgt] : feedback_edges)
        edges.push_back({src, tgt});
    j["feedback_edges"] = edges;
    return j.dump(2);
}

void ReservoirConfig::save_json(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << to_json_text() << '\n';
}

Reservoir::Reservoir(ReservoirConfig cfg)
    : cfg_(std::move(cfg)), lfsr_(cfg_.lfsr.seed, cfg_.lfsr.taps) {
    cfg_.validate();
    n_neurons_ = cfg_.total_neurons();
    n_syn_ = cfg_.synapses.size();

    syn_weight_.resize(n_syn_);
    syn_target_count_.resize(n_syn_);
    syn_mode_.resize(n_syn_);
    syn_feedback_slot_.assign(n_syn_, -1);
    syn_source_.resize(n_syn_);
    syn_target_.resize(n_syn_);
    incoming_.assign(n_neurons_, {});
    for (size_t i = 0; i < n_syn_; ++i) {
        const SynapseSpec& s = cfg_.synapses[i];
        syn_weight_[i] = s.synapse.weight.raw();
        syn_target_count_[i] = s.synapse.pulse_count_target;
        syn_mode_[i] = s.synapse.compare_mode == CompareMode::Threshold ? 1 : 0;
        syn_source_[i] = s.source;
        syn_target_[i] = s.target;
        incoming_[s.target].push_back(int(i));
        if (!s.source.is_input) {
            for (size_t e = 0; e < cfg_.feedback_edges.size(); ++e) {
                if (cfg_.feedback_edges[e].first == s.source.index &&
                    cfg_.feedback_edges[e].second == s.target) {
                    syn_feedback_slot_[i] = int(e);
                    break;
                }
            }
        }
    }

    samples_.resize(n_syn_);
    src_bits_.resize(n_syn_);
    new_counters_.resize(n_syn_);
    contrib_.resize(n_syn_);
    v_s_.resize(n_neurons_);
    new_v_m_.resize(n_neurons_);
    new_refr_.resize(n_neurons_);
    spike_bits_.resize(n_neurons_);
    reset();
}

void Reservoir::reset() {
    v_m_.assign(n_neurons_, cfg_.neuron.v_reset.raw());
    refractory_.assign(n_neurons_, 0);
    counters_.assign(n_syn_, 0);
    prev_spikes_.assign(n_neurons_, 0);
    delayed_.assign(cfg_.feedback_edges.size(), 0);
    lfsr_ = Lfsr6(cfg_.lfsr.seed, cfg_.lfsr.taps);
}

Reservoir::StepResult Reservoir::step(std::span<const uint8_t> input_bits) {
    if (input_bits.size() != size_t(cfg_.input_channels))
        throw ShapeError("reservoir: got " + std::to_string(input_bits.size()) +
                         " input bits, config has " + std::to_string(cfg_.input_channels) +
                         " channels");

    // (1) one LFSR draw per synapse, ascending synapse index
    for (size_t i = 0; i < n_syn_; ++i)
        samples_[i] = int32_t(lfsr_.step() % Lfsr6::kWeightGridSize) - 3;

    // (2) source bits: external inputs from this step, neurons from the
    // previous one; feedback edges read their delay registers
    for (size_t i = 0; i < n_syn_; ++i) {
        const SynapseSource& src = syn_source_[i];
        if (src.is_input)
            src_bits_[i] = input_bits[src.index];
        else if (syn_feedback_slot_[i] >= 0)
            src_bits_[i] = delayed_[syn_feedback_slot_[i]];
        else
            src_bits_[i] = prev_spikes_[src.index];
    }

    const fx::Format mem_fmt = cfg_.neuron.v_threshold.fmt();
    const int32_t contrib_mag =
        int32_t(fx::shr(fx::quantize(1.0, mem_fmt), cfg_.neuron.contribution_shift).raw());

    // (3) synapse gate + counters
    kern::SynapseBatch sb;
    sb.n = n_syn_;
    sb.counters = counters_.data();
    sb.src_spikes = src_bits_.data();
    sb.samples = samples_.data();
    sb.weights = syn_weight_.data();
    sb.targets = syn_target_count_.data();
    sb.modes = syn_mode_.data();
    sb.contrib_mag = contrib_mag;
    sb.out_counters = new_counters_.data();
    sb.out_contrib = contrib_.data();
    kern::active().synapse_batch(sb);
    counters_.swap(new_counters_);

    // (4) accumulate per neuron (saturating)
    const int64_t lo = mem_fmt.raw_min(), hi = mem_fmt.raw_max();
    for (int id = 0; id < n_neurons_; ++id) {
        int64_t sum = 0;
        for (int si : incoming_[id])
            sum = fx::detail::clamp_raw(sum + contrib_[si], lo, hi, nullptr);
        v_s_[id] = int32_t(sum);
    }

    // (5) membrane update
    kern::MembraneBatch mb;
    mb.n = size_t(n_neurons_);
    mb.v_m = v_m_.data();
    mb.v_s = v_s_.data();
    mb.refractory = refractory_.data();
    mb.v_reset = cfg_.neuron.v_reset.raw();
    mb.v_threshold = cfg_.neuron.v_threshold.raw();
    mb.decay = cfg_.neuron.decay_constant.raw();
    mb.refractory_steps = cfg_.neuron.refractory_steps;
    mb.frac_bits = int(cfg_.neuron.decay_constant.fmt().frac);
    mb.raw_min = int32_t(lo);
    mb.raw_max = int32_t(hi);
    mb.out_v_m = new_v_m_.data();
    mb.out_refractory = new_refr_.data();
    mb.out_spikes = spike_bits_.data();
    kern::active().membrane_batch(mb);
    v_m_.swap(new_v_m_);
    refractory_.swap(new_refr_);

    // (6) latch delay registers and the previous-step spikes
    for (size_t e = 0; e < delayed_.size(); ++e)
        delayed_[e] = spike_bits_[cfg_.feedback_edges[e].first];
    prev_spikes_.assign(spike_bits_.begin(), spike_bits_.end());

    StepResult result;
    result.spikes = prev_spikes_;
    result.membranes.resize(n_neurons_);
    const double scale = mem_fmt.step();
    for (int id = 0; id < n_neurons_; ++id)
        result.membranes[id] = double(v_m_[id]) * scale;
    return result;
}

StateTrace Reservoir::run(const SpikeTrainSet& stimulus) {
    if (stimulus.channels != size_t(cfg_.input_channels))
        throw ShapeError("reservoir: stimulus has " + std::to_string(stimulus.channels) +
                         " channels, config has " + std::to_string(cfg_.input_channels));
    reset();
    StateTrace trace(stimulus.timesteps, size_t(n_neurons_), true);
    std::vector<uint8_t> column(stimulus.channels);
    for (size_t t = 0; t < stimulus.timesteps; ++t) {
        for (size_t c = 0; c < stimulus.channels; ++c)
            column[c] = stimulus.at(c, t);
        const StepResult r = step(column);
        for (int id = 0; id < n_neurons_; ++id) {
            trace.set(t, id, r.membranes[id]);
            trace.set_raw(t, id, v_m_[id]);
        }
    }
    return trace;
}

namespace {

double mean_pair_distance(std::span<const StateTrace> xs, std::span<const StateTrace> ys) {
    double total = 0.0;
    size_t pairs = 0;
    for (const StateTrace& x : xs) {
        for (const StateTrace& y : ys) {
            const auto& a = x.values();
            const auto& b = y.values();
            double d2 = 0.0;
            for (size_t i = 0; i < a.size(); ++i) {
                const double d = a[i] - b[i];
                d2 += d * d;
            }
            total += std::sqrt(d2);
            ++pairs;
        }
    }
    return total / double(pairs);
}

} // namespace

double separation_metric(std::span<const StateTrace> class_a,
                         std::span<const StateTrace> class_b) {
    if (class_a.empty() || class_b.empty())
        throw ShapeError("separation_metric: empty class");
    const size_t steps = class_a[0].steps();
    const size_t neurons = class_a[0].neurons();
    auto check = [&](const StateTrace& t) {
        if (t.steps() != steps || t.neurons() != neurons)
            throw ShapeError("separation_metric: traces have mixed shapes");
    };
    for (const StateTrace& t : class_a) check(t);
    for (const StateTrace& t : class_b) check(t);

    const double intra = 0.5 * (mean_pair_distance(class_a, class_a) +
                                mean_pair_distance(class_b, class_b));
    if (intra == 0.0)
        throw DegenerateError("separation_metric: intra-class distance is zero");
    return mean_pair_distance(class_a, class_b) / intra;
}

} // namespace lsm
