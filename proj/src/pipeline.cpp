#include "lsm/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include <nlohmann/json.hpp>

#include "lsm/csv.hpp"
#include "lsm/rng.hpp"

namespace lsm {

using nlohmann::json;

namespace {

uint64_t utterance_seed(uint64_t stage, size_t index) {
    return stage_seed(stage + 0x9e3779b97f4a7c15ull * (index + 1), "utterance");
}

std::string utt_name(size_t index, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "utt_%04zu.%s.csv", index, suffix);
    return buf;
}

} // namespace

PipelineConfig PipelineConfig::load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("bad pipeline config " + path.string() + ": " + e.what());
    }

    PipelineConfig cfg;
    try {
        cfg.seed = j.value("seed", cfg.seed);
        cfg.workdir = j.value("workdir", cfg.workdir.string());
        cfg.test_fraction = j.value("test_fraction", cfg.test_fraction);
        cfg.sample_frames = j.value("sample_frames", cfg.sample_frames);
        if (j.contains("dataset")) {
            const json& d = j["dataset"];
            cfg.dataset.classes = d.value("classes", cfg.dataset.classes);
            cfg.dataset.per_class = d.value("per_class", cfg.dataset.per_class);
            cfg.dataset.jitter_sigma = d.value("jitter_sigma", cfg.dataset.jitter_sigma);
            cfg.dataset.frames = d.value("frames", cfg.dataset.frames);
            cfg.dataset.order = d.value("order", cfg.dataset.order);
        }
        if (j.contains("frontend")) {
            const json& f = j["frontend"];
            cfg.frontend.lpc_order = f.value("lpc_order", cfg.frontend.lpc_order);
            cfg.frontend.frame_ms = f.value("frame_ms", cfg.frontend.frame_ms);
            cfg.frontend.hop_ms = f.value("hop_ms", cfg.frontend.hop_ms);
            cfg.frontend.preemphasis = f.value("preemphasis", cfg.frontend.preemphasis);
            cfg.frontend.silence_threshold =
                f.value("silence_threshold", cfg.frontend.silence_threshold);
            cfg.frontend.silence_frame_ms =
                f.value("silence_frame_ms", cfg.frontend.silence_frame_ms);
        }
        if (j.contains("encoding")) {
            const json& e = j["encoding"];
            cfg.encoding.timesteps = e.value("timesteps", cfg.encoding.timesteps);
            cfg.encoding.rate_min = e.value("rate_min", cfg.encoding.rate_min);
            cfg.encoding.rate_max = e.value("rate_max", cfg.encoding.rate_max);
            cfg.encoding.dt = e.value("dt", cfg.encoding.dt);
        }
        if (j.contains("reservoir"))
            cfg.reservoir =
                ReservoirConfig::parse_json_text(j["reservoir"].dump(), path.string());
        if (j.contains("readout")) {
            const json& r = j["readout"];
            cfg.readout.epochs = r.value("epochs", cfg.readout.epochs);
            cfg.readout.learning_rate = r.value("learning_rate", cfg.readout.learning_rate);
            cfg.readout.momentum = r.value("momentum", cfg.readout.momentum);
            cfg.readout.goal_mse = r.value("goal_mse", cfg.readout.goal_mse);
            cfg.readout.hidden = r.value("hidden", cfg.readout.hidden);
            const std::string opt = r.value("optimizer", std::string("backprop"));
            if (opt == "lm")
                cfg.readout.optimizer = Optimizer::LM;
            else if (opt == "backprop")
                cfg.readout.optimizer = Optimizer::Backprop;
            else
                throw ConfigError("readout optimizer must be backprop or lm, got '" + opt + "'");
        }
    } catch (const json::exception& e) {
        throw FormatError("bad pipeline config " + path.string() + ": " + e.what());
    }
    return cfg;
}

void PipelineConfig::save_json(const std::filesystem::path& path) const {
    json j;
    j["seed"] = seed;
    j["workdir"] = workdir.string();
    j["test_fraction"] = test_fraction;
    j["sample_frames"] = sample_frames;
    j["dataset"] = {{"classes", dataset.classes},
                    {"per_class", dataset.per_class},
                    {"jitter_sigma", dataset.jitter_sigma},
                    {"frames", dataset.frames},
                    {"order", dataset.order}};
    j["frontend"] = {{"lpc_order", frontend.lpc_order},
                     {"frame_ms", frontend.frame_ms},
                     {"hop_ms", frontend.hop_ms},
                     {"preemphasis", frontend.preemphasis},
                     {"silence_threshold", frontend.silence_threshold},
                     {"silence_frame_ms", frontend.silence_frame_ms}};
    j["encoding"] = {{"timesteps", encoding.timesteps},
                     {"rate_min", encoding.rate_min},
                     {"rate_max", encoding.rate_max},
                     {"dt", encoding.dt}};
    j["reservoir"] = json::parse(reservoir.to_json_text());
    j["readout"] = {{"epochs", readout.epochs},
                    {"learning_rate", readout.learning_rate},
                    {"momentum", readout.momentum},
                    {"goal_mse", readout.goal_mse},
                    {"hidden", readout.hidden},
                    {"optimizer", readout.optimizer == Optimizer::LM ? "lm" : "backprop"}};
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void write_feature_csv(const std::filesystem::path& path, const std::vector<FeatureRow>& rows) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    if (rows.empty())
        throw ShapeError("feature csv: no rows to write");
    out << "label";
    for (size_t d = 0; d < rows[0].values.size(); ++d)
        out << ",f" << d;
    out << '\n';
    for (const FeatureRow& r : rows) {
        out << r.label;
        for (double v : r.values)
            out << ',' << csv::fmt_double(v);
        out << '\n';
    }
}

std::vector<FeatureRow> read_feature_csv(const std::filesystem::path& path) {
    const csv::Table table = csv::read(path);
    if (table.rows.size() < 2)
        throw FormatError("feature csv " + path.string() + ": no data rows");
    if (table.rows[0].empty() || table.rows[0][0] != "label")
        throw FormatError("feature csv " + path.string() + ": missing label column");
    std::vector<FeatureRow> rows;
    for (size_t i = 1; i < table.rows.size(); ++i) {
        const auto& cells = table.rows[i];
        if (cells.size() != table.rows[0].size())
            throw FormatError("feature csv " + path.string() + ": ragged row " +
                              std::to_string(i));
        FeatureRow r;
        r.label = std::stoi(cells[0]);
        for (size_t c = 1; c < cells.size(); ++c)
            r.values.push_back(std::stod(cells[c]));
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_states_csv(const std::filesystem::path& path,
                      const std::vector<SampledState>& states) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    if (states.empty())
        throw ShapeError("states csv: nothing to write");
    out << "label";
    for (size_t d = 0; d < states[0].values.size(); ++d)
        out << ",s" << d;
    out << '\n';
    for (const SampledState& s : states) {
        out << s.label;
        for (double v : s.values)
            out << ',' << csv::fmt_double(v);
        out << '\n';
    }
}

std::vector<SampledState> read_states_csv(const std::filesystem::path& path) {
    const csv::Table table = csv::read(path);
    if (table.rows.size() < 2)
        throw FormatError("states csv " + path.string() + ": no data rows");
    if (table.rows[0].empty() || table.rows[0][0] != "label")
        throw FormatError("states csv " + path.string() + ": missing label column");
    std::vector<SampledState> states;
    for (size_t i = 1; i < table.rows.size(); ++i) {
        const auto& cells = table.rows[i];
        if (cells.size() != table.rows[0].size())
            throw FormatError("states csv " + path.string() + ": ragged row " +
                              std::to_string(i));
        SampledState s;
        s.label = std::stoi(cells[0]);
        for (size_t c = 1; c < cells.size(); ++c)
            s.values.push_back(std::stod(cells[c]));
        states.push_back(std::move(s));
    }
    return states;
}

std::vector<FeatureRow> features_from_synth(const SynthConfig& cfg) {
    std::vector<FeatureRow> rows;
    for (const FeatureSequence& seq : synth_dataset(cfg))
        rows.push_back({seq.label, pooled_features(seq)});
    return rows;
}

std::vector<FeatureRow> features_from_wav_dir(const std::filesystem::path& dir,
                                              const FrontendConfig& cfg) {
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::is_directory(dir))
        throw IoError("not a directory: " + dir.string());
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".wav")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw IoError("no inputs: no .wav files in " + dir.string());

    std::vector<FeatureRow> rows;
    for (const auto& file : files) {
        const std::string stem = file.stem().string();
        size_t digits = 0;
        while (digits < stem.size() && std::isdigit(static_cast<unsigned char>(stem[digits])))
            ++digits;
        if (digits == 0)
            throw FormatError(file.string() + ": file name must start with the class label");
        Utterance u = load_wav(file);
        u.label = std::stoi(stem.substr(0, digits));
        rows.push_back({u.label, pooled_features(extract_features(u, cfg))});
    }
    return rows;
}

std::vector<std::filesystem::path> encode_stage(const std::vector<FeatureRow>& rows,
                                                const EncodingConfig& cfg, uint64_t global_seed,
                                                const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const uint64_t base = stage_seed(global_seed, "encode");
    std::vector<std::filesystem::path> files;
    for (size_t i = 0; i < rows.size(); ++i) {
        const SpikeTrainSet set =
            encode_poisson(rows[i].values, cfg, utterance_seed(base, i), rows[i].label);
        std::filesystem::path file = out_dir / utt_name(i, "spikes");
        set.write_csv(file);
        files.push_back(std::move(file));
    }
    return files;
}

std::vector<SampledState> simulate_stage(const std::vector<std::filesystem::path>& spike_files,
                                         const ReservoirConfig& cfg, Engine engine,
                                         const std::filesystem::path& out_dir, int threads,
                                         int sample_frames) {
    std::filesystem::create_directories(out_dir);
    const RefConfig ref_cfg = RefConfig::from_reservoir(cfg);

    std::vector<SampledState> states(spike_files.size());
    std::vector<std::string> failures(spike_files.size());
    std::atomic<size_t> next{0};

    auto worker = [&]() {
        // each worker owns an engine instance; utterances are independent
        Reservoir reservoir(cfg);
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= spike_files.size())
                break;
            try {
                const SpikeTrainSet stimulus = SpikeTrainSet::read_csv(spike_files[i]);
                StateTrace trace = engine == Engine::Fixed ? reservoir.run(stimulus)
                                                           : ref_run(ref_cfg, stimulus);
                std::filesystem::path trace_file = out_dir / spike_files[i].filename();
                std::string name = trace_file.filename().string();
                const size_t pos = name.find(".spikes.csv");
                if (pos != std::string::npos)
                    name = name.substr(0, pos) + ".trace.csv";
                trace.write_csv(out_dir / name);
                states[i] = sample_states(trace, sample_frames);
                states[i].label = stimulus.label;
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };

    const int n_threads = std::max(1, threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back(worker);
        for (std::thread& t : pool)
            t.join();
    }
    for (size_t i = 0; i < failures.size(); ++i)
        if (!failures[i].empty())
            throw Error("simulate: " + spike_files[i].string() + ": " + failures[i]);
    return states;
}

SplitResult stratified_split(const std::vector<SampledState>& states, double test_fraction,
                             uint64_t seed) {
    if (test_fraction < 0.0 || test_fraction >= 1.0)
        throw ConfigError("test_fraction must lie in [0, 1)");
    std::map<int, std::vector<size_t>> by_label;
    for (size_t i = 0; i < states.size(); ++i)
        by_label[states[i].label].push_back(i);

    Rng rng(stage_seed(seed, "split"));
    SplitResult result;
    for (auto& [label, indices] : by_label) {
        // Fisher-Yates with the owned rng
        for (size_t i = indices.size(); i > 1; --i)
            std::swap(indices[i - 1], indices[size_t(rng.uniform_int(0, int64_t(i) - 1))]);
        const size_t n_test = size_t(std::lround(double(indices.size()) * test_fraction));
        for (size_t i = 0; i < indices.size(); ++i) {
            if (i < n_test)
                result.test.push_back(states[indices[i]]);
            else
                result.train.push_back(states[indices[i]]);
        }
    }
    return result;
}

Evaluation evaluate(const ReadoutModel& model, const std::vector<SampledState>& states) {
    if (states.empty())
        throw ShapeError("evaluate: no samples");
    Evaluation eval;
    eval.confusion.assign(size_t(model.outputs()), std::vector<int>(size_t(model.outputs()), 0));
    int correct = 0;
    for (const SampledState& s : states) {
        const int predicted = classify(model, s).first;
        if (s.label >= 0 && s.label < model.outputs())
            ++eval.confusion[size_t(s.label)][size_t(predicted)];
        if (predicted == s.label)
            ++correct;
    }
    eval.accuracy = double(correct) / double(states.size());
    return eval;
}

namespace {

EngineRunSummary train_and_eval(const std::vector<SampledState>& states,
                                const PipelineConfig& cfg,
                                const std::filesystem::path& model_path) {
    const SplitResult split = stratified_split(states, cfg.test_fraction, cfg.seed);
    TrainConfig tc = cfg.readout;
    tc.seed = stage_seed(cfg.seed, "train");
    const ReadoutModel model = train(split.train, tc);
    model.save_json(model_path);

    EngineRunSummary summary;
    summary.train_log = model.log();
    summary.train_accuracy = evaluate(model, split.train).accuracy;
    summary.test_eval = evaluate(model, split.test.empty() ? split.train : split.test);
    summary.test_accuracy = summary.test_eval.accuracy;
    return summary;
}

} // namespace

EngineRunSummary run_pipeline(const PipelineConfig& cfg, Engine engine, int threads) {
    std::filesystem::create_directories(cfg.workdir);

    SynthConfig synth = cfg.dataset;
    synth.seed = stage_seed(cfg.seed, "dataset");
    const std::vector<FeatureRow> rows = features_from_synth(synth);
    write_feature_csv(cfg.workdir / "features.csv", rows);

    const auto spike_files =
        encode_stage(rows, cfg.encoding, cfg.seed, cfg.workdir / "spikes");

    const std::string engine_dir = engine == Engine::Fixed ? "fixed" : "float";
    const auto states = simulate_stage(spike_files, cfg.reservoir, engine,
                                       cfg.workdir / engine_dir, threads, cfg.sample_frames);
    write_states_csv(cfg.workdir / engine_dir / "states.csv", states);

    return train_and_eval(states, cfg, cfg.workdir / engine_dir / "model.json");
}

CompareResult run_compare(const PipelineConfig& cfg, int threads) {
    std::filesystem::create_directories(cfg.workdir);

    SynthConfig synth = cfg.dataset;
    synth.seed = stage_seed(cfg.seed, "dataset");
    const std::vector<FeatureRow> rows = features_from_synth(synth);
    write_feature_csv(cfg.workdir / "features.csv", rows);

    const auto spike_files =
        encode_stage(rows, cfg.encoding, cfg.seed, cfg.workdir / "spikes");

    CompareResult result;
    for (Engine engine : {Engine::Fixed, Engine::Float}) {
        const std::string engine_dir = engine == Engine::Fixed ? "fixed" : "float";
        const auto states = simulate_stage(spike_files, cfg.reservoir, engine,
                                           cfg.workdir / engine_dir, threads, cfg.sample_frames);
        write_states_csv(cfg.workdir / engine_dir / "states.csv", states);
        EngineRunSummary summary =
            train_and_eval(states, cfg, cfg.workdir / engine_dir / "model.json");
        (engine == Engine::Fixed ? result.fixed : result.floating) = summary;
    }
    result.divergence_points =
        divergence(result.fixed.test_accuracy, result.floating.test_accuracy);
    return result;
}

} // namespace lsm
