#pragma once

#include <filesystem>
#include <vector>

#include "lsm/encoding.hpp"
#include "lsm/frontend.hpp"
#include "lsm/readout.hpp"
#include "lsm/reference.hpp"
#include "lsm/reservoir.hpp"

namespace lsm {

enum class Engine { Fixed, Float };

struct PipelineConfig {
    uint64_t seed = 1;
    std::filesystem::path workdir = "out";
    SynthConfig dataset;
    FrontendConfig frontend;
    EncodingConfig encoding;
    ReservoirConfig reservoir = ReservoirConfig::stock();
    TrainConfig readout;
    double test_fraction = 0.25;
    int sample_frames = 5;

    static PipelineConfig load_json(const std::filesystem::path& path);
    void save_json(const std::filesystem::path& path) const;
};

struct FeatureRow {
    int label = -1;
    std::vector<double> values;
};

void write_feature_csv(const std::filesystem::path& path, const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_feature_csv(const std::filesystem::path& path);

// label, then the sampled state entries
void write_states_csv(const std::filesystem::path& path, const std::vector<SampledState>& states);
std::vector<SampledState> read_states_csv(const std::filesystem::path& path);

// Feature stage. Synthetic rows are pooled instances of the class templates;
// WAV rows are trimmed, LPC-analyzed and pooled. WAV labels come from the
// leading digits of the file name.
std::vector<FeatureRow> features_from_synth(const SynthConfig& cfg);
std::vector<FeatureRow> features_from_wav_dir(const std::filesystem::path& dir,
                                              const FrontendConfig& cfg);

// Encode stage: one spike-train CSV per feature row, named utt_%04d.spikes.csv.
std::vector<std::filesystem::path> encode_stage(const std::vector<FeatureRow>& rows,
                                                const EncodingConfig& cfg, uint64_t global_seed,
                                                const std::filesystem::path& out_dir);

// Simulate stage: runs the chosen engine over every spike file (optionally in
// parallel across utterances), writes utt_XXXX.trace.csv next to out_dir and
// returns the sampled states in utterance order.
std::vector<SampledState> simulate_stage(const std::vector<std::filesystem::path>& spike_files,
                                         const ReservoirConfig& cfg, Engine engine,
                                         const std::filesystem::path& out_dir, int threads,
                                         int sample_frames);

struct SplitResult {
    std::vector<SampledState> train;
    std::vector<SampledState> test;
};
SplitResult stratified_split(const std::vector<SampledState>& states, double test_fraction,
                             uint64_t seed);

struct Evaluation {
    double accuracy = 0.0;
    std::vector<std::vector<int>> confusion; // [true][predicted]
};
Evaluation evaluate(const ReadoutModel& model, const std::vector<SampledState>& states);

struct EngineRunSummary {
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    Evaluation test_eval;
    TrainLog train_log;
};

struct CompareResult {
    EngineRunSummary fixed;
    EngineRunSummary floating;
    double divergence_points = 0.0;
};

// Shared-data dual run: one synthetic dataset, one encoding, both engines,
// separately trained readouts, test-accuracy divergence.
CompareResult run_compare(const PipelineConfig& cfg, int threads);

// Single-engine end-to-end run (features -> encode -> simulate -> train ->
// eval) inside cfg.workdir.
EngineRunSummary run_pipeline(const PipelineConfig& cfg, Engine engine, int threads);

} // namespace lsm
