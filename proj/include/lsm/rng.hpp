#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace lsm {

// mt19937_64 plus hand-rolled distributions. The standard engine is fully
// specified, but the standard distributions are not; owning the uniform ->
// normal mapping keeps artifacts byte-reproducible across toolchains.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return double(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // [lo, hi] inclusive.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        const uint64_t span = uint64_t(hi - lo) + 1;
        return lo + int64_t(engine_() % span);
    }

    bool bernoulli(double p) {
        return uniform() < p;
    }

    // Box-Muller, one cached value.
    double normal(double mean = 0.0, double stddev = 1.0) {
        if (has_cached_) {
            has_cached_ = false;
            return mean + stddev * cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return mean + stddev * radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// Derives a per-stage seed from the global one so stages can be re-run
// independently without disturbing each other's streams.
uint64_t stage_seed(uint64_t global_seed, std::string_view stage_tag);

} // namespace lsm
