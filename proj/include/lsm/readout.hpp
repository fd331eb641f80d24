#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "lsm/trace.hpp"

namespace lsm {

struct SampledState {
    std::vector<double> values; // neurons x frames, neuron-major
    int label = -1;
};

// Picks rows ceil(k*T/frames) (1-indexed, k = 1..frames) and concatenates
// neuron potentials in neuron-major order: entry n*frames + k is neuron n at
// frame k.
SampledState sample_states(const StateTrace& trace, int frames = 5);

enum class Optimizer { Backprop, LM };

struct TrainConfig {
    int epochs = 2000;
    double learning_rate = 0.01;
    double momentum = 0.9;
    double goal_mse = 1e-3;
    uint64_t seed = 1;
    Optimizer optimizer = Optimizer::Backprop;
    int hidden = 30;
};

struct TrainLog {
    int epochs_run = 0;
    double final_mse = 0.0;
    bool reached_goal = false;
    double train_accuracy = 0.0;
};

// Input-hidden-output MLP with logistic activations throughout, trained on
// one-hot targets under MSE. Inputs are min-max normalized per dimension
// (the scaler is part of the model).
class ReadoutModel {
public:
    ReadoutModel() = default;
    ReadoutModel(int inputs, int hidden, int outputs, uint64_t seed);

    int inputs() const { return inputs_; }
    int hidden() const { return hidden_; }
    int outputs() const { return outputs_; }
    const TrainLog& log() const { return log_; }

    std::vector<double> forward(const std::vector<double>& input) const;

    void save_json(const std::filesystem::path& path) const;
    static ReadoutModel load_json(const std::filesystem::path& path);

private:
    friend ReadoutModel train(const std::vector<SampledState>&, const TrainConfig&);
    friend double gradient_check(const ReadoutModel&, const SampledState&);
    friend class Trainer;

    std::vector<double> normalize(const std::vector<double>& input) const;

    int inputs_ = 0, hidden_ = 0, outputs_ = 0;
    std::vector<double> w1_, b1_; // hidden x inputs, hidden
    std::vector<double> w2_, b2_; // outputs x hidden, outputs
    std::vector<double> in_lo_, in_hi_; // per-dimension scaler
    TrainLog log_;
};

// Full-batch gradient descent with momentum, or damped Gauss-Newton (LM).
// Deterministic per seed; stops at goal MSE or the epoch budget (budget
// exhaustion is flagged in the log, not an error). Throws DegenerateError
// when the samples contain a single class.
ReadoutModel train(const std::vector<SampledState>& samples, const TrainConfig& cfg);

// argmax of the output activations; ties break toward the lowest class id.
std::pair<int, std::vector<double>> classify(const ReadoutModel& model, const SampledState& s);

// Max relative error between analytic and central-difference gradients
// (h = 1e-5) over all weights and biases.
double gradient_check(const ReadoutModel& model, const SampledState& sample);

} // namespace lsm
