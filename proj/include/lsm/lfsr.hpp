#pragma once

#include <cstdint>
#include <vector>

#include "lsm/errors.hpp"
#include "lsm/fxp.hpp"

namespace lsm {

// 6-bit Fibonacci LFSR. Register positions are numbered 1 (LSB, the shift-in
// end) through 6; each step shifts toward position 6 and feeds the XOR of the
// tapped positions back into position 1. The default taps {6,5} realize
// x^6 + x^5 + 1, which is maximal: the state sequence visits every nonzero
// 6-bit value once per 63 steps.
class Lfsr6 {
public:
    static constexpr int kBits = 6;
    static constexpr uint8_t kStateMask = 0x3f;
    static constexpr int kWeightGridSize = 7;

    explicit Lfsr6(uint8_t seed = 1, std::vector<int> taps = {6, 5});

    // Advance one step; the new state is the output sample.
    uint8_t step();

    // Advance one step and map the state onto the Fix_4_3 weight grid.
    fx::Value sample_weight();

    // Pre-draw n weights (one step each) in order.
    std::vector<fx::Value> draw_weights(size_t n);

    uint8_t state() const { return state_; }
    const std::vector<int>& taps() const { return taps_; }

    // The 7 Fix_4_3 grid points inside [-0.4, 0.4]: raw (state mod 7) - 3,
    // i.e. {-0.375, -0.25, -0.125, 0, 0.125, 0.25, 0.375}.
    static fx::Value weight_from_state(uint8_t state);

private:
    uint8_t state_;
    uint8_t tap_mask_;
    std::vector<int> taps_;
};

} // namespace lsm
