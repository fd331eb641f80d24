#include "lsm/readout.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "lsm/errors.hpp"
#include "lsm/kernels.hpp"
#include "lsm/rng.hpp"

namespace lsm {

using nlohmann::json;

SampledState sample_states(const StateTrace& trace, int frames) {
    if (frames < 1)
        throw ConfigError("sample_states: frames must be >= 1");
    const size_t T = trace.steps();
    if (T < size_t(frames))
        throw ShapeError("sample_states: trace has " + std::to_string(T) +
                         " steps, need at least " + std::to_string(frames));
    std::vector<size_t> rows(frames);
    for (int k = 1; k <= frames; ++k) {
        // ceil(k*T/frames), 1-indexed -> 0-indexed row
        rows[k - 1] = (size_t(k) * T + frames - 1) / frames - 1;
    }
    SampledState out;
    out.values.resize(trace.neurons() * size_t(frames));
    for (size_t n = 0; n < trace.neurons(); ++n)
        for (int k = 0; k < frames; ++k)
            out.values[n * size_t(frames) + k] = trace.at(rows[k], n);
    return out;
}

namespace {

inline double sigmoid(double z) {
    return 1.0 / (1.0 + std::exp(-z));
}

} // namespace

ReadoutModel::ReadoutModel(int inputs, int hidden, int outputs, uint64_t seed)
    : inputs_(inputs), hidden_(hidden), outputs_(outputs) {
    if (inputs < 1 || hidden < 1 || outputs < 1)
        throw ConfigError("readout: all layer sizes must be >= 1");
    Rng rng(seed);
    const double s1 = 1.0 / std::sqrt(double(inputs));
    const double s2 = 1.0 / std::sqrt(double(hidden));
    w1_.resize(size_t(hidden) * inputs);
    b1_.assign(size_t(hidden), 0.0);
    w2_.resize(size_t(outputs) * hidden);
    b2_.assign(size_t(outputs), 0.0);
    for (double& w : w1_)
        w = rng.uniform(-s1, s1);
    for (double& w : w2_)
        w = rng.uniform(-s2, s2);
}

std::vector<double> ReadoutModel::normalize(const std::vector<double>& input) const {
    if (in_lo_.empty())
        return input;
    std::vector<double> out(input.size());
    for (size_t d = 0; d < input.size(); ++d) {
        const double span = in_hi_[d] - in_lo_[d];
        out[d] = span > 0.0 ? 2.0 * (input[d] - in_lo_[d]) / span - 1.0 : 0.0;
    }
    return out;
}

std::vector<double> ReadoutModel::forward(const std::vector<double>& input) const {
    if (input.size() != size_t(inputs_))
        throw ShapeError("readout: input has " + std::to_string(input.size()) +
                         " dims, model expects " + std::to_string(inputs_));
    const std::vector<double> x = normalize(input);
    const kern::Ops& ops = kern::active();
    std::vector<double> h(hidden_);
    for (int j = 0; j < hidden_; ++j)
        h[j] = sigmoid(ops.dot(w1_.data() + size_t(j) * inputs_, x.data(), x.size()) + b1_[j]);
    std::vector<double> y(outputs_);
    for (int o = 0; o < outputs_; ++o)
        y[o] = sigmoid(ops.dot(w2_.data() + size_t(o) * hidden_, h.data(), h.size()) + b2_[o]);
    return y;
}

namespace {

// Shared forward/backward machinery for both optimizers and the gradient
// check. Gradients are of the per-sample loss mean_o (y_o - t_o)^2.
struct Workspace {
    std::vector<double> x, h, y, delta2, delta1;
};

struct Grads {
    std::vector<double> w1, b1, w2, b2;
    void reset(int inputs, int hidden, int outputs) {
        w1.assign(size_t(hidden) * inputs, 0.0);
        b1.assign(size_t(hidden), 0.0);
        w2.assign(size_t(outputs) * hidden, 0.0);
        b2.assign(size_t(outputs), 0.0);
    }
};

} // namespace

class Trainer {
public:
    explicit Trainer(ReadoutModel& m) : m_(m) {}

    std::vector<double>& w1() { return m_.w1_; }
    std::vector<double>& b1() { return m_.b1_; }
    std::vector<double>& w2() { return m_.w2_; }
    std::vector<double>& b2() { return m_.b2_; }
    TrainLog& log() { return m_.log_; }

    void forward(const std::vector<double>& raw_input, Workspace& ws) const {
        const kern::Ops& ops = kern::active();
        ws.x = m_.normalize(raw_input);
        ws.h.resize(m_.hidden_);
        for (int j = 0; j < m_.hidden_; ++j)
            ws.h[j] = sigmoid(
                ops.dot(m_.w1_.data() + size_t(j) * m_.inputs_, ws.x.data(), ws.x.size()) +
                m_.b1_[j]);
        ws.y.resize(m_.outputs_);
        for (int o = 0; o < m_.outputs_; ++o)
            ws.y[o] = sigmoid(
                ops.dot(m_.w2_.data() + size_t(o) * m_.hidden_, ws.h.data(), ws.h.size()) +
                m_.b2_[o]);
    }

    // loss = mean_o (y_o - t_o)^2; accumulates d(loss)/d(theta) * weight
    double backward(const SampledState& sample, double weight, Workspace& ws,
                    Grads& grads) const {
        const kern::Ops& ops = kern::active();
        forward(sample.values, ws);
        const double inv_outputs = 1.0 / double(m_.outputs_);
        double loss = 0.0;
        ws.delta2.resize(m_.outputs_);
        for (int o = 0; o < m_.outputs_; ++o) {
            const double t = sample.label == o ? 1.0 : 0.0;
            const double err = ws.y[o] - t;
            loss += err * err * inv_outputs;
            ws.delta2[o] = 2.0 * inv_outputs * err * ws.y[o] * (1.0 - ws.y[o]);
        }
        ws.delta1.assign(m_.hidden_, 0.0);
        for (int o = 0; o < m_.outputs_; ++o) {
            ops.axpy(ws.delta2[o], m_.w2_.data() + size_t(o) * m_.hidden_, ws.delta1.data(),
                     size_t(m_.hidden_));
            ops.axpy(weight * ws.delta2[o], ws.h.data(), grads.w2.data() + size_t(o) * m_.hidden_,
                     size_t(m_.hidden_));
            grads.b2[o] += weight * ws.delta2[o];
        }
        for (int j = 0; j < m_.hidden_; ++j) {
            ws.delta1[j] *= ws.h[j] * (1.0 - ws.h[j]);
            ops.axpy(weight * ws.delta1[j], ws.x.data(), grads.w1.data() + size_t(j) * m_.inputs_,
                     size_t(m_.inputs_));
            grads.b1[j] += weight * ws.delta1[j];
        }
        return loss;
    }

    double batch_mse(const std::vector<SampledState>& samples) const {
        Workspace ws;
        double total = 0.0;
        for (const SampledState& s : samples) {
            forward(s.values, ws);
            const double inv_outputs = 1.0 / double(m_.outputs_);
            for (int o = 0; o < m_.outputs_; ++o) {
                const double t = s.label == o ? 1.0 : 0.0;
                total += (ws.y[o] - t) * (ws.y[o] - t) * inv_outputs;
            }
        }
        return total / double(samples.size());
    }

    ReadoutModel& m_;
};

namespace {

double accuracy_on(const ReadoutModel& model, const std::vector<SampledState>& samples) {
    int correct = 0;
    for (const SampledState& s : samples)
        if (classify(model, s).first == s.label)
            ++correct;
    return double(correct) / double(samples.size());
}

void fit_scaler(ReadoutModel& model, const std::vector<SampledState>& samples, int inputs,
                std::vector<double>& lo, std::vector<double>& hi) {
    lo.assign(size_t(inputs), std::numeric_limits<double>::infinity());
    hi.assign(size_t(inputs), -std::numeric_limits<double>::infinity());
    for (const SampledState& s : samples) {
        for (int d = 0; d < inputs; ++d) {
            lo[d] = std::min(lo[d], s.values[d]);
            hi[d] = std::max(hi[d], s.values[d]);
        }
    }
    (void)model;
}

void train_backprop(ReadoutModel& model, const std::vector<SampledState>& samples,
                    const TrainConfig& cfg, Trainer& tr) {
    const size_t n = samples.size();
    Grads grads, velocity;
    velocity.reset(model.inputs(), model.hidden(), model.outputs());
    Workspace ws;

    auto apply = [&](std::vector<double>& w, std::vector<double>& v,
                     const std::vector<double>& g) {
        for (size_t i = 0; i < w.size(); ++i) {
            v[i] = cfg.momentum * v[i] - cfg.learning_rate * g[i];
            w[i] += v[i];
        }
    };

    double mse = tr.batch_mse(samples);
    int epoch = 0;
    for (; epoch < cfg.epochs && mse > cfg.goal_mse; ++epoch) {
        grads.reset(model.inputs(), model.hidden(), model.outputs());
        for (const SampledState& s : samples)
            tr.backward(s, 1.0 / double(n), ws, grads);
        apply(tr.w1(), velocity.w1, grads.w1);
        apply(tr.b1(), velocity.b1, grads.b1);
        apply(tr.w2(), velocity.w2, grads.w2);
        apply(tr.b2(), velocity.b2, grads.b2);
        mse = tr.batch_mse(samples);
    }
    tr.log().epochs_run = epoch;
    tr.log().final_mse = mse;
    tr.log().reached_goal = mse <= cfg.goal_mse;
}

// Damped Gauss-Newton on the stacked per-output residuals.
void train_lm(ReadoutModel& model, const std::vector<SampledState>& samples,
              const TrainConfig& cfg, Trainer& tr) {
    const int inputs = model.inputs(), hidden = model.hidden(), outputs = model.outputs();
    const size_t p1 = size_t(hidden) * inputs, p2 = size_t(hidden);
    const size_t p3 = size_t(outputs) * hidden, p4 = size_t(outputs);
    const size_t P = p1 + p2 + p3 + p4;

    auto pack = [&](std::vector<double>& theta) {
        theta.clear();
        theta.insert(theta.end(), tr.w1().begin(), tr.w1().end());
        theta.insert(theta.end(), tr.b1().begin(), tr.b1().end());
        theta.insert(theta.end(), tr.w2().begin(), tr.w2().end());
        theta.insert(theta.end(), tr.b2().begin(), tr.b2().end());
    };
    auto unpack = [&](const std::vector<double>& theta) {
        std::copy_n(theta.begin(), p1, tr.w1().begin());
        std::copy_n(theta.begin() + p1, p2, tr.b1().begin());
        std::copy_n(theta.begin() + p1 + p2, p3, tr.w2().begin());
        std::copy_n(theta.begin() + p1 + p2 + p3, p4, tr.b2().begin());
    };

    // One Jacobian row per (sample, output): d r / d theta with r = y_o - t_o.
    std::vector<double> row(P);
    std::vector<double> jtj(P * P);
    std::vector<double> jtr(P);
    Workspace ws;

    auto build_normal_eqs = [&](double& sse) {
        std::fill(jtj.begin(), jtj.end(), 0.0);
        std::fill(jtr.begin(), jtr.end(), 0.0);
        sse = 0.0;
        const kern::Ops& ops = kern::active();
        for (const SampledState& s : samples) {
            tr.forward(s.values, ws);
            for (int o = 0; o < outputs; ++o) {
                const double t = s.label == o ? 1.0 : 0.0;
                const double r = ws.y[o] - t;
                sse += r * r;
                const double dz2 = ws.y[o] * (1.0 - ws.y[o]);
                std::fill(row.begin(), row.end(), 0.0);
                // w2 row o, b2[o]
                for (int j = 0; j < hidden; ++j)
                    row[p1 + p2 + size_t(o) * hidden + j] = dz2 * ws.h[j];
                row[p1 + p2 + p3 + o] = dz2;
                // through hidden
                for (int j = 0; j < hidden; ++j) {
                    const double dz1 =
                        dz2 * tr.w2()[size_t(o) * hidden + j] * ws.h[j] * (1.0 - ws.h[j]);
                    for (int d = 0; d < inputs; ++d)
                        row[size_t(j) * inputs + d] = dz1 * ws.x[d];
                    row[p1 + j] = dz1;
                }
                // accumulate normal equations (upper triangle)
                for (size_t a = 0; a < P; ++a) {
                    if (row[a] == 0.0)
                        continue;
                    ops.axpy(row[a], row.data() + a, jtj.data() + a * P + a, P - a);
                    jtr[a] += row[a] * r;
                }
            }
        }
        for (size_t a = 0; a < P; ++a)
            for (size_t b = 0; b < a; ++b)
                jtj[a * P + b] = jtj[b * P + a];
    };

    // in-place Cholesky solve of (JtJ + lambda I) delta = -Jtr
    std::vector<double> chol(P * P), rhs(P);
    auto solve = [&](double lambda, std::vector<double>& delta) -> bool {
        chol = jtj;
        for (size_t i = 0; i < P; ++i)
            chol[i * P + i] += lambda;
        for (size_t i = 0; i < P; ++i) {
            for (size_t j = 0; j <= i; ++j) {
                double sum = chol[i * P + j];
                for (size_t k = 0; k < j; ++k)
                    sum -= chol[i * P + k] * chol[j * P + k];
                if (i == j) {
                    if (sum <= 0.0)
                        return false;
                    chol[i * P + i] = std::sqrt(sum);
                } else {
                    chol[i * P + j] = sum / chol[j * P + j];
                }
            }
        }
        rhs.assign(jtr.begin(), jtr.end());
        for (double& v : rhs)
            v = -v;
        for (size_t i = 0; i < P; ++i) {
            double sum = rhs[i];
            for (size_t k = 0; k < i; ++k)
                sum -= chol[i * P + k] * rhs[k];
            rhs[i] = sum / chol[i * P + i];
        }
        delta.assign(P, 0.0);
        for (size_t ii = P; ii-- > 0;) {
            double sum = rhs[ii];
            for (size_t k = ii + 1; k < P; ++k)
                sum -= chol[k * P + ii] * delta[k];
            delta[ii] = sum / chol[ii * P + ii];
        }
        return true;
    };

    const double denom = double(samples.size()) * outputs;
    std::vector<double> theta, trial, delta;
    pack(theta);
    double lambda = 1e-3;
    double sse = 0.0;
    build_normal_eqs(sse);
    double mse = sse / denom;
    int iter = 0;
    for (; iter < cfg.epochs && mse > cfg.goal_mse && lambda < 1e12; ++iter) {
        if (!solve(lambda, delta)) {
            lambda *= 10.0;
            continue;
        }
        trial = theta;
        for (size_t i = 0; i < P; ++i)
            trial[i] += delta[i];
        unpack(trial);
        const double trial_mse = tr.batch_mse(samples);
        if (trial_mse < mse) {
            theta = trial;
            mse = trial_mse;
            lambda = std::max(lambda * 0.1, 1e-12);
            build_normal_eqs(sse);
        } else {
            unpack(theta);
            lambda *= 10.0;
        }
    }
    unpack(theta);
    tr.log().epochs_run = iter;
    tr.log().final_mse = mse;
    tr.log().reached_goal = mse <= cfg.goal_mse;
}

} // namespace

ReadoutModel train(const std::vector<SampledState>& samples, const TrainConfig& cfg) {
    if (samples.empty())
        throw ShapeError("train: no samples");
    const size_t dim = samples[0].values.size();
    std::set<int> labels;
    for (const SampledState& s : samples) {
        if (s.values.size() != dim)
            throw ShapeError("train: samples have mixed dimensions");
        if (s.label < 0)
            throw ConfigError("train: sample without a label");
        for (double v : s.values)
            if (!std::isfinite(v))
                throw ConfigError("train: non-finite feature");
        labels.insert(s.label);
    }
    if (labels.size() < 2)
        throw DegenerateError("train: need at least two classes");
    const int outputs = *labels.rbegin() + 1;

    ReadoutModel model(int(dim), cfg.hidden, outputs, cfg.seed);
    fit_scaler(model, samples, int(dim), model.in_lo_, model.in_hi_);

    Trainer tr(model);
    if (cfg.optimizer == Optimizer::LM)
        train_lm(model, samples, cfg, tr);
    else
        train_backprop(model, samples, cfg, tr);
    model.log_.train_accuracy = accuracy_on(model, samples);
    return model;
}

std::pair<int, std::vector<double>> classify(const ReadoutModel& model, const SampledState& s) {
    std::vector<double> scores = model.forward(s.values);
    int best = 0;
    for (int o = 1; o < int(scores.size()); ++o)
        if (scores[o] > scores[best])
            best = o;
    return {best, std::move(scores)};
}

double gradient_check(const ReadoutModel& model, const SampledState& sample) {
    ReadoutModel work = model;
    Trainer tr(work);
    Grads analytic;
    analytic.reset(work.inputs(), work.hidden(), work.outputs());
    Workspace ws;
    tr.backward(sample, 1.0, ws, analytic);

    const double h = 1e-5;
    double worst = 0.0;
    auto loss_at = [&]() {
        tr.forward(sample.values, ws);
        double loss = 0.0;
        for (int o = 0; o < work.outputs(); ++o) {
            const double t = sample.label == o ? 1.0 : 0.0;
            loss += (ws.y[o] - t) * (ws.y[o] - t) / double(work.outputs());
        }
        return loss;
    };
    auto check_block = [&](std::vector<double>& params, const std::vector<double>& grad) {
        for (size_t i = 0; i < params.size(); ++i) {
            const double saved = params[i];
            params[i] = saved + h;
            const double up = loss_at();
            params[i] = saved - h;
            const double down = loss_at();
            params[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double denom = std::max({std::abs(grad[i]), std::abs(numeric), 1e-8});
            worst = std::max(worst, std::abs(grad[i] - numeric) / denom);
        }
    };
    check_block(work.w1_, analytic.w1);
    check_block(work.b1_, analytic.b1);
    check_block(work.w2_, analytic.w2);
    check_block(work.b2_, analytic.b2);
    return worst;
}

void ReadoutModel::save_json(const std::filesystem::path& path) const {
    json j;
    j["inputs"] = inputs_;
    j["hidden"] = hidden_;
    j["outputs"] = outputs_;
    j["hidden_activation"] = "sigmoid";
    j["output_activation"] = "sigmoid";
    j["w1"] = w1_;
    j["b1"] = b1_;
    j["w2"] = w2_;
    j["b2"] = b2_;
    j["in_lo"] = in_lo_;
    j["in_hi"] = in_hi_;
    j["log"] = {{"epochs_run", log_.epochs_run},
                {"final_mse", log_.final_mse},
                {"reached_goal", log_.reached_goal},
                {"train_accuracy", log_.train_accuracy}};
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

ReadoutModel ReadoutModel::load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("bad model file " + path.string() + ": " + e.what());
    }
    ReadoutModel m;
    try {
        m.inputs_ = j.at("inputs").get<int>();
        m.hidden_ = j.at("hidden").get<int>();
        m.outputs_ = j.at("outputs").get<int>();
        m.w1_ = j.at("w1").get<std::vector<double>>();
        m.b1_ = j.at("b1").get<std::vector<double>>();
        m.w2_ = j.at("w2").get<std::vector<double>>();
        m.b2_ = j.at("b2").get<std::vector<double>>();
        m.in_lo_ = j.value("in_lo", std::vector<double>{});
        m.in_hi_ = j.value("in_hi", std::vector<double>{});
        if (j.contains("log")) {
            m.log_.epochs_run = j["log"].value("epochs_run", 0);
            m.log_.final_mse = j["log"].value("final_mse", 0.0);
            m.log_.reached_goal = j["log"].value("reached_goal", false);
            m.log_.train_accuracy = j["log"].value("train_accuracy", 0.0);
        }
    } catch (const json::exception& e) {
        throw FormatError("bad model file " + path.string() + ": " + e.what());
    }
    if (m.w1_.size() != size_t(m.hidden_) * m.inputs_ ||
        m.w2_.size() != size_t(m.outputs_) * m.hidden_ || m.b1_.size() != size_t(m.hidden_) ||
        m.b2_.size() != size_t(m.outputs_))
        throw FormatError("model file " + path.string() + ": inconsistent dimensions");
    return m;
}

} // namespace lsm
