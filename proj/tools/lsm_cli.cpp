// lsm: spiking-reservoir recognition pipeline driver.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "lsm/kernels.hpp"
#include "lsm/pipeline.hpp"
#include "lsm/resources.hpp"

namespace fs = std::filesystem;
using namespace lsm;

namespace {

void print_confusion(const Evaluation& eval) {
    const size_t n = eval.confusion.size();
    std::printf("      predicted\n true ");
    for (size_t c = 0; c < n; ++c)
        std::printf("%5zu", c);
    std::printf("\n");
    for (size_t r = 0; r < n; ++r) {
        std::printf("%5zu ", r);
        for (size_t c = 0; c < n; ++c)
            std::printf("%5d", eval.confusion[r][c]);
        std::printf("\n");
    }
}

std::vector<fs::path> list_spike_files(const fs::path& dir) {
    std::vector<fs::path> files;
    if (!fs::is_directory(dir))
        throw IoError("not a directory: " + dir.string());
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.find(".spikes.csv") != std::string::npos)
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw IoError("no inputs: no *.spikes.csv files in " + dir.string());
    return files;
}

struct Common {
    std::string config_path;
    int64_t seed = -1;
    std::string kernels = "auto";

    PipelineConfig load() const {
        PipelineConfig cfg;
        if (!config_path.empty())
            cfg = PipelineConfig::load_json(config_path);
        if (seed >= 0)
            cfg.seed = uint64_t(seed);
        return cfg;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiplier-less spiking reservoir: emulation, pipeline and reports"};
    app.require_subcommand(1);

    Common common;
    app.add_option("--config", common.config_path, "pipeline config (JSON)")->capture_default_str();
    app.add_option("--seed", common.seed, "override the global seed");
    app.add_option("--kernels", common.kernels, "kernel variant: auto|scalar|avx2")
        ->capture_default_str();

    // features
    auto* cmd_features = app.add_subcommand("features", "extract or synthesize feature rows");
    std::string wav_dir;
    std::string features_out = "features.csv";
    cmd_features->add_option("--wav-dir", wav_dir, "directory of labeled .wav files");
    cmd_features->add_option("--out", features_out, "output CSV")->capture_default_str();

    // encode
    auto* cmd_encode = app.add_subcommand("encode", "feature rows -> Poisson spike trains");
    std::string encode_features = "features.csv";
    std::string encode_out = "spikes";
    cmd_encode->add_option("--features", encode_features, "feature CSV")->capture_default_str();
    cmd_encode->add_option("--out", encode_out, "output directory")->capture_default_str();

    // simulate
    auto* cmd_simulate = app.add_subcommand("simulate", "run an engine over spike trains");
    std::string sim_spikes = "spikes";
    std::string sim_out = "sim";
    std::string sim_engine = "fixed";
    std::string sim_reservoir;
    int sim_threads = 1;
    cmd_simulate->add_option("--spikes", sim_spikes, "spike-train directory")
        ->capture_default_str();
    cmd_simulate->add_option("--out", sim_out, "output directory")->capture_default_str();
    cmd_simulate->add_option("--engine", sim_engine, "fixed|float")->capture_default_str();
    cmd_simulate->add_option("--reservoir-config", sim_reservoir,
                             "standalone reservoir config (JSON)");
    cmd_simulate->add_option("--threads", sim_threads, "worker threads")->capture_default_str();

    // train
    auto* cmd_train = app.add_subcommand("train", "train the readout on sampled states");
    std::string train_states = "states.csv";
    std::string train_model = "model.json";
    double train_test_fraction = -1.0;
    cmd_train->add_option("--states", train_states, "sampled-state CSV")->capture_default_str();
    cmd_train->add_option("--model", train_model, "model output (JSON)")->capture_default_str();
    cmd_train->add_option("--test-fraction", train_test_fraction,
                          "held-out fraction (default from config; 0 trains on everything)");

    // eval
    auto* cmd_eval = app.add_subcommand("eval", "evaluate a model on sampled states");
    std::string eval_states = "states.csv";
    std::string eval_model = "model.json";
    cmd_eval->add_option("--states", eval_states, "sampled-state CSV")->capture_default_str();
    cmd_eval->add_option("--model", eval_model, "model (JSON)")->capture_default_str();

    // compare
    auto* cmd_compare = app.add_subcommand("compare", "fixed vs float end-to-end comparison");
    int compare_threads = 1;
    std::string compare_out;
    cmd_compare->add_option("--threads", compare_threads, "worker threads")
        ->capture_default_str();
    cmd_compare->add_option("--out", compare_out, "work directory (overrides config)");

    // pipeline
    auto* cmd_pipeline = app.add_subcommand("pipeline", "run all stages with one engine");
    std::string pipe_engine = "fixed";
    int pipe_threads = 1;
    std::string pipe_out;
    cmd_pipeline->add_option("--engine", pipe_engine, "fixed|float")->capture_default_str();
    cmd_pipeline->add_option("--threads", pipe_threads, "worker threads")->capture_default_str();
    cmd_pipeline->add_option("--out", pipe_out, "work directory (overrides config)");

    // resources
    auto* cmd_resources = app.add_subcommand("resources", "FPGA resource estimate");
    long res_neurons = 8;
    long res_synapses = 16;
    std::string res_design = "proposed";
    bool res_csv = false;
    bool res_fit = false;
    cmd_resources->add_option("--neurons", res_neurons, "neuron count")->capture_default_str();
    cmd_resources->add_option("--synapses", res_synapses, "synapse count")
        ->capture_default_str();
    cmd_resources->add_option("--design", res_design, "proposed|traditional")
        ->capture_default_str();
    cmd_resources->add_flag("--csv", res_csv, "emit CSV instead of text");
    cmd_resources->add_flag("--fit-check", res_fit, "check the model against published figures");

    CLI11_PARSE(app, argc, argv);

    try {
        kern::select(common.kernels);
        PipelineConfig cfg = common.load();

        if (*cmd_features) {
            std::vector<FeatureRow> rows;
            if (!wav_dir.empty()) {
                rows = features_from_wav_dir(wav_dir, cfg.frontend);
            } else {
                SynthConfig synth = cfg.dataset;
                synth.seed = stage_seed(cfg.seed, "dataset");
                rows = features_from_synth(synth);
            }
            write_feature_csv(features_out, rows);
            std::printf("features: wrote %zu rows x %zu dims to %s\n", rows.size(),
                        rows.empty() ? 0 : rows[0].values.size(), features_out.c_str());
        } else if (*cmd_encode) {
            const auto rows = read_feature_csv(encode_features);
            const auto files = encode_stage(rows, cfg.encoding, cfg.seed, encode_out);
            std::printf("encode: wrote %zu spike files (%zu channels x %zu steps) to %s\n",
                        files.size(), rows[0].values.size(), cfg.encoding.timesteps,
                        encode_out.c_str());
        } else if (*cmd_simulate) {
            if (sim_engine != "fixed" && sim_engine != "float")
                throw ConfigError("--engine must be fixed or float");
            ReservoirConfig rc = cfg.reservoir;
            if (!sim_reservoir.empty())
                rc = ReservoirConfig::load_json(sim_reservoir);
            const auto files = list_spike_files(sim_spikes);
            const Engine engine = sim_engine == "fixed" ? Engine::Fixed : Engine::Float;
            const auto states =
                simulate_stage(files, rc, engine, sim_out, sim_threads, cfg.sample_frames);
            write_states_csv(fs::path(sim_out) / "states.csv", states);
            std::printf("simulate (%s): %zu traces -> %s, states.csv has %zu rows x %zu cols\n",
                        sim_engine.c_str(), files.size(), sim_out.c_str(), states.size(),
                        states[0].values.size());
        } else if (*cmd_train) {
            const auto states = read_states_csv(train_states);
            const double tf = train_test_fraction >= 0.0 ? train_test_fraction : cfg.test_fraction;
            const SplitResult split = stratified_split(states, tf, cfg.seed);
            TrainConfig tc = cfg.readout;
            tc.seed = stage_seed(cfg.seed, "train");
            const ReadoutModel model = train(split.train, tc);
            model.save_json(train_model);
            const Evaluation train_eval = evaluate(model, split.train);
            std::printf("train: %d epochs, final mse %.6g%s, train accuracy %.2f %%\n",
                        model.log().epochs_run, model.log().final_mse,
                        model.log().reached_goal ? " (goal reached)" : " (budget exhausted)",
                        100.0 * train_eval.accuracy);
            if (!split.test.empty()) {
                const Evaluation test_eval = evaluate(model, split.test);
                std::printf("test accuracy %.2f %% (%zu held-out samples)\n",
                            100.0 * test_eval.accuracy, split.test.size());
                print_confusion(test_eval);
            }
        } else if (*cmd_eval) {
            const auto states = read_states_csv(eval_states);
            const ReadoutModel model = ReadoutModel::load_json(eval_model);
            const Evaluation eval = evaluate(model, states);
            std::printf("eval: accuracy %.2f %% over %zu samples\n", 100.0 * eval.accuracy,
                        states.size());
            print_confusion(eval);
        } else if (*cmd_compare) {
            if (!compare_out.empty())
                cfg.workdir = compare_out;
            const CompareResult r = run_compare(cfg, compare_threads);
            std::printf("fixed engine: train %.2f %%, test %.2f %%\n",
                        100.0 * r.fixed.train_accuracy, 100.0 * r.fixed.test_accuracy);
            std::printf("float engine: train %.2f %%, test %.2f %%\n",
                        100.0 * r.floating.train_accuracy, 100.0 * r.floating.test_accuracy);
            std::printf("divergence: %.2f percentage points\n", r.divergence_points);
            std::printf("\nfixed-engine test confusion:\n");
            print_confusion(r.fixed.test_eval);
            std::printf("\nfloat-engine test confusion:\n");
            print_confusion(r.floating.test_eval);
        } else if (*cmd_pipeline) {
            if (pipe_engine != "fixed" && pipe_engine != "float")
                throw ConfigError("--engine must be fixed or float");
            if (!pipe_out.empty())
                cfg.workdir = pipe_out;
            const Engine engine = pipe_engine == "fixed" ? Engine::Fixed : Engine::Float;
            const EngineRunSummary s = run_pipeline(cfg, engine, pipe_threads);
            std::printf("pipeline (%s): train %.2f %%, test %.2f %% (mse %.6g after %d epochs)\n",
                        pipe_engine.c_str(), 100.0 * s.train_accuracy, 100.0 * s.test_accuracy,
                        s.train_log.final_mse, s.train_log.epochs_run);
            print_confusion(s.test_eval);
        } else if (*cmd_resources) {
            if (res_design != "proposed" && res_design != "traditional")
                throw ConfigError("--design must be proposed or traditional");
            const Design design =
                res_design == "proposed" ? Design::Proposed : Design::Traditional;
            const ResourceEstimate e = estimate(res_neurons, res_synapses, design);
            if (res_csv) {
                std::printf("neurons,synapses,design,neuron_slices,synapse_slices,slices,"
                            "multipliers,device_slices,utilization_percent\n");
                std::printf("%ld,%ld,%s,%ld,%ld,%ld,%ld,%ld,%.4f\n", e.neurons, e.synapses,
                            res_design.c_str(), e.neuron_slices, e.synapse_slices, e.slices,
                            e.multipliers, e.device_slices, 100.0 * e.utilization);
            } else {
                std::printf("design: %s\n", res_design.c_str());
                std::printf("neurons: %ld, synapses: %ld\n", e.neurons, e.synapses);
                std::printf("slices: %ld (%ld neuron + %ld synapse) of %ld (%.2f %% utilization)\n",
                            e.slices, e.neuron_slices, e.synapse_slices, e.device_slices,
                            100.0 * e.utilization);
                std::printf("embedded multipliers: %ld\n", e.multipliers);
            }
            if (res_fit) {
                bool all = true;
                for (const FitPoint& p : fit_check()) {
                    std::printf("%-50s expected %4ld got %4ld %s\n", p.name.c_str(), p.expected,
                                p.actual, p.match ? "MATCH" : "MISMATCH");
                    all = all && p.match;
                }
                if (!all)
                    return 1;
            }
        }
    } catch (const std::exception& e) {
        std::string stage = "cli";
        for (const auto* sub : app.get_subcommands())
            stage = sub->get_name();
        std::fprintf(stderr, "error (%s): %s\n", stage.c_str(), e.what());
        return 1;
    }
    return 0;
}
