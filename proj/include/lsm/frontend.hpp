#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "lsm/errors.hpp"

namespace lsm {

struct Utterance {
    std::vector<double> samples; // normalized to [-1, 1]
    int sample_rate = 16000;
    int label = -1;
};

// RIFF/WAVE PCM reader (8/16-bit, mono or stereo; stereo is averaged).
Utterance load_wav(const std::filesystem::path& path);

// 16-bit PCM mono writer.
void save_wav(const std::filesystem::path& path, const Utterance& u);

// Removes leading/trailing frames whose short-time energy falls below
// energy_threshold * peak frame energy. Frame-aligned, hence idempotent.
Utterance trim_silence(const Utterance& u, double energy_threshold, double frame_ms);

// Autocorrelation-method linear prediction via Levinson-Durbin.
// Coefficients follow the predictor convention x[n] ~ sum a_k x[n-k]
// (an AR(1) signal with pole 0.9 yields a_1 ~ 0.9).
struct LpcResult {
    std::vector<double> coeffs;     // a_1..a_order
    std::vector<double> reflection; // k_1..k_order, |k| < 1 on valid frames
    double prediction_error = 0.0;
};
LpcResult lpc_analyze(std::span<const double> frame, int order);
std::vector<double> lpc(std::span<const double> frame, int order); // coeffs only

struct FrontendConfig {
    int lpc_order = 10;
    double frame_ms = 25.0;
    double hop_ms = 10.0;
    double preemphasis = 0.97;
    double silence_threshold = 0.01; // fraction of peak frame energy
    double silence_frame_ms = 10.0;
};

// Per-frame LPC features of one utterance.
struct FeatureSequence {
    size_t frame_count = 0;
    size_t coeff_count = 0;          // = lpc_order
    std::vector<double> coeffs;      // frame_count x coeff_count, row-major
    std::vector<double> lars;        // log-area ratios, same shape
    int label = -1;

    double coeff_at(size_t f, size_t c) const { return coeffs[f * coeff_count + c]; }
    double lar_at(size_t f, size_t c) const { return lars[f * coeff_count + c]; }
};

// Trim, pre-emphasize, window (Hamming), analyze every frame.
FeatureSequence extract_features(const Utterance& u, const FrontendConfig& cfg);

// Mean-pooled 2*order vector (coefficients then log-area ratios) that feeds
// the spike encoder's channels.
std::vector<double> pooled_features(const FeatureSequence& seq);

// Synthetic stand-in for a spoken-digit corpus: per class, a template
// trajectory in feature space; instances add Gaussian jitter. Templates are
// laid out so every class pair is separated by at least three grid levels in
// one of the first few dimensions, far above the jitter scale.
struct SynthConfig {
    int classes = 10;
    int per_class = 20;
    uint64_t seed = 1;
    double jitter_sigma = 0.02;
    int frames = 8;
    int order = 10; // pooled feature dim = 2*order
};

std::vector<FeatureSequence> synth_dataset(const SynthConfig& cfg);

// The jitter-free pooled class templates (used to measure separation).
std::vector<std::vector<double>> synth_templates(const SynthConfig& cfg);

} // namespace lsm
