#include "lsm/frontend.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lsm/rng.hpp"

namespace lsm {

Utterance trim_silence(const Utterance& u, double energy_threshold, double frame_ms) {
    if (energy_threshold <= 0.0 || energy_threshold >= 1.0)
        throw ConfigError("trim_silence: threshold must lie in (0, 1)");
    if (u.samples.empty())
        throw EmptySignalError("trim_silence: empty signal");

    const size_t frame_len =
        std::max<size_t>(1, size_t(std::lround(frame_ms * u.sample_rate / 1000.0)));
    const size_t n_frames = (u.samples.size() + frame_len - 1) / frame_len;

    std::vector<double> energy(n_frames, 0.0);
    for (size_t f = 0; f < n_frames; ++f) {
        const size_t begin = f * frame_len;
        const size_t end = std::min(begin + frame_len, u.samples.size());
        for (size_t i = begin; i < end; ++i)
            energy[f] += u.samples[i] * u.samples[i];
    }
    const double peak = *std::max_element(energy.begin(), energy.end());
    if (peak <= 0.0)
        throw EmptySignalError("trim_silence: signal is silent");

    const double cut = energy_threshold * peak;
    size_t first = 0, last = n_frames - 1;
    while (first < n_frames && energy[first] < cut)
        ++first;
    while (last > first && energy[last] < cut)
        --last;

    Utterance out;
    out.sample_rate = u.sample_rate;
    out.label = u.label;
    const size_t begin = first * frame_len;
    const size_t end = std::min((last + 1) * frame_len, u.samples.size());
    out.samples.assign(u.samples.begin() + begin, u.samples.begin() + end);
    return out;
}

LpcResult lpc_analyze(std::span<const double> frame, int order) {
    if (order < 1)
        throw ConfigError("lpc: order must be >= 1");
    if (frame.size() <= size_t(order))
        throw ConfigError("lpc: frame length " + std::to_string(frame.size()) +
                          " must exceed order " + std::to_string(order));

    std::vector<double> r(order + 1, 0.0);
    for (int k = 0; k <= order; ++k)
        for (size_t n = k; n < frame.size(); ++n)
            r[k] += frame[n] * frame[n - k];

    if (r[0] <= 0.0)
        throw NumericalError("lpc: zero-energy frame");

    LpcResult result;
    result.coeffs.assign(order, 0.0);
    result.reflection.assign(order, 0.0);
    double error = r[0];
    std::vector<double> prev(order, 0.0);
    for (int i = 1; i <= order; ++i) {
        double acc = r[i];
        for (int j = 1; j < i; ++j)
            acc -= result.coeffs[j - 1] * r[i - j];
        const double k = acc / error;
        result.reflection[i - 1] = k;
        prev = result.coeffs;
        result.coeffs[i - 1] = k;
        for (int j = 1; j < i; ++j)
            result.coeffs[j - 1] = prev[j - 1] - k * prev[i - j - 1];
        error *= (1.0 - k * k);
        if (error <= 0.0)
            throw NumericalError("lpc: nonpositive prediction error at order " +
                                 std::to_string(i));
    }
    result.prediction_error = error;
    return result;
}

std::vector<double> lpc(std::span<const double> frame, int order) {
    return lpc_analyze(frame, order).coeffs;
}

FeatureSequence extract_features(const Utterance& u, const FrontendConfig& cfg) {
    const Utterance trimmed = trim_silence(u, cfg.silence_threshold, cfg.silence_frame_ms);

    std::vector<double> signal(trimmed.samples.size());
    signal[0] = trimmed.samples[0];
    for (size_t i = 1; i < signal.size(); ++i)
        signal[i] = trimmed.samples[i] - cfg.preemphasis * trimmed.samples[i - 1];

    const size_t frame_len = size_t(std::lround(cfg.frame_ms * u.sample_rate / 1000.0));
    const size_t hop = std::max<size_t>(1, size_t(std::lround(cfg.hop_ms * u.sample_rate / 1000.0)));
    if (signal.size() < frame_len)
        throw ConfigError("extract_features: signal shorter than one frame");

    std::vector<double> window(frame_len);
    for (size_t i = 0; i < frame_len; ++i)
        window[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * double(i) / double(frame_len - 1));

    FeatureSequence seq;
    seq.coeff_count = size_t(cfg.lpc_order);
    seq.label = u.label;
    std::vector<double> frame(frame_len);
    for (size_t start = 0; start + frame_len <= signal.size(); start += hop) {
        for (size_t i = 0; i < frame_len; ++i)
            frame[i] = signal[start + i] * window[i];
        LpcResult lp;
        try {
            lp = lpc_analyze(frame, cfg.lpc_order);
        } catch (const NumericalError&) {
            continue; // degenerate frame (e.g. interior silence); skip it
        }
        seq.coeffs.insert(seq.coeffs.end(), lp.coeffs.begin(), lp.coeffs.end());
        for (double k : lp.reflection) {
            const double clamped = std::clamp(k, -0.999999, 0.999999);
            seq.lars.push_back(std::log((1.0 - clamped) / (1.0 + clamped)));
        }
        ++seq.frame_count;
    }
    if (seq.frame_count == 0)
        throw EmptySignalError("extract_features: no analyzable frames");
    return seq;
}

std::vector<double> pooled_features(const FeatureSequence& seq) {
    std::vector<double> pooled(2 * seq.coeff_count, 0.0);
    for (size_t f = 0; f < seq.frame_count; ++f) {
        for (size_t c = 0; c < seq.coeff_count; ++c) {
            pooled[c] += seq.coeff_at(f, c);
            pooled[seq.coeff_count + c] += seq.lar_at(f, c);
        }
    }
    for (double& v : pooled)
        v /= double(seq.frame_count);
    return pooled;
}

namespace {

// Per-dimension class layout: 10 evenly spaced levels visited in a
// multiplicative order, so any two classes sit >= 3 levels apart in at least
// one of the first dimensions.
int level_of(int cls, int dim, int classes) {
    static constexpr int kMultipliers[4] = {1, 3, 7, 9};
    int k = kMultipliers[dim % 4];
    while (std::gcd(k, classes) != 1)
        k = 1;
    return (cls * k + dim) % classes;
}

double template_base(int cls, int dim, int classes) {
    const double lo = 0.1, hi = 0.9;
    return lo + (hi - lo) * (double(level_of(cls, dim, classes)) + 0.5) / double(classes);
}

} // namespace

std::vector<std::vector<double>> synth_templates(const SynthConfig& cfg) {
    const int dims = 2 * cfg.order;
    std::vector<std::vector<double>> templates(cfg.classes, std::vector<double>(dims));
    for (int c = 0; c < cfg.classes; ++c)
        for (int d = 0; d < dims; ++d)
            templates[c][d] = template_base(c, d, cfg.classes);
    return templates;
}

std::vector<FeatureSequence> synth_dataset(const SynthConfig& cfg) {
    if (cfg.per_class < 2)
        throw ConfigError("synth_dataset: per_class must be >= 2");
    if (cfg.classes < 2)
        throw ConfigError("synth_dataset: need at least two classes");

    const int dims = 2 * cfg.order;

    // class-specific trajectory detail on top of the base levels
    Rng template_rng(stage_seed(cfg.seed, "synth-templates"));
    std::vector<double> phase(size_t(cfg.classes) * dims);
    std::vector<double> wobble(size_t(cfg.classes) * dims);
    for (double& p : phase)
        p = template_rng.uniform(0.0, 2.0 * M_PI);
    for (double& a : wobble)
        a = template_rng.uniform(0.01, 0.03);

    Rng jitter_rng(stage_seed(cfg.seed, "synth-jitter"));
    std::vector<FeatureSequence> out;
    out.reserve(size_t(cfg.classes) * cfg.per_class);
    for (int c = 0; c < cfg.classes; ++c) {
        for (int inst = 0; inst < cfg.per_class; ++inst) {
            FeatureSequence seq;
            seq.label = c;
            seq.frame_count = size_t(cfg.frames);
            seq.coeff_count = size_t(cfg.order);
            seq.coeffs.resize(seq.frame_count * seq.coeff_count);
            seq.lars.resize(seq.frame_count * seq.coeff_count);
            for (int f = 0; f < cfg.frames; ++f) {
                for (int d = 0; d < dims; ++d) {
                    const size_t pd = size_t(c) * dims + d;
                    const double traj = template_base(c, d, cfg.classes) +
                                        wobble[pd] * std::sin(2.0 * M_PI * f / cfg.frames +
                                                              phase[pd]);
                    const double v = traj + jitter_rng.normal(0.0, cfg.jitter_sigma);
                    if (d < cfg.order)
                        seq.coeffs[size_t(f) * seq.coeff_count + d] = v;
                    else
                        seq.lars[size_t(f) * seq.coeff_count + (d - cfg.order)] = v;
                }
            }
            out.push_back(std::move(seq));
        }
    }
    return out;
}

} // namespace lsm
