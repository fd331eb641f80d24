#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace lsm {

// One utterance's stimulus: a channels x timesteps binary matrix.
struct SpikeTrainSet {
    size_t channels = 0;
    size_t timesteps = 0;
    std::vector<uint8_t> bits; // row-major, channels x timesteps
    double dt = 0.000125;
    int label = -1;
    uint64_t seed = 0;

    SpikeTrainSet() = default;
    SpikeTrainSet(size_t channels, size_t timesteps)
        : channels(channels), timesteps(timesteps), bits(channels * timesteps, 0) {}

    uint8_t at(size_t channel, size_t t) const { return bits[channel * timesteps + t]; }
    void set(size_t channel, size_t t, bool v) { bits[channel * timesteps + t] = v ? 1 : 0; }

    // Rows of 0/1 per channel, preceded by one metadata comment line
    // (# dt=... label=... seed=...).
    void write_csv(const std::filesystem::path& path) const;
    static SpikeTrainSet read_csv(const std::filesystem::path& path);
};

} // namespace lsm
