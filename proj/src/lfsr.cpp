#include "lsm/lfsr.hpp"

#include <bit>
#include <string>

namespace lsm {

Lfsr6::Lfsr6(uint8_t seed, std::vector<int> taps) : state_(seed), taps_(std::move(taps)) {
    if (seed == 0 || seed > kStateMask)
        throw ZeroStateError("lfsr seed must be in [1, 63], got " + std::to_string(int(seed)));
    if (taps_.empty())
        throw ConfigError("lfsr taps must not be empty");
    tap_mask_ = 0;
    for (int t : taps_) {
        if (t < 1 || t > kBits)
            throw ConfigError("lfsr tap position " + std::to_string(t) + " out of [1, 6]");
        tap_mask_ |= uint8_t(1u << (t - 1));
    }
}

uint8_t Lfsr6::step() {
    const uint8_t feedback = uint8_t(std::popcount(uint8_t(state_ & tap_mask_)) & 1);
    state_ = uint8_t(((state_ << 1) | feedback) & kStateMask);
    return state_;
}

fx::Value Lfsr6::weight_from_state(uint8_t state) {
    const int grid_index = state % kWeightGridSize;
    return fx::Value(int32_t(grid_index - 3), fx::kFix4_3);
}

fx::Value Lfsr6::sample_weight() {
    return weight_from_state(step());
}

std::vector<fx::Value> Lfsr6::draw_weights(size_t n) {
    std::vector<fx::Value> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i)
        out.push_back(sample_weight());
    return out;
}

} // namespace lsm
