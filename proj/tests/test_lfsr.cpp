#include <doctest.h>

#include <map>
#include <set>

#include "lsm/lfsr.hpp"

using namespace lsm;

TEST_CASE("maximal-length period: every nonzero state once per 63 steps") {
    for (uint8_t seed : {uint8_t(1), uint8_t(9), uint8_t(42), uint8_t(63)}) {
        Lfsr6 lfsr(seed);
        std::set<uint8_t> visited;
        int steps_to_return = 0;
        for (int i = 1; i <= 200; ++i) {
            const uint8_t s = lfsr.step();
            CHECK(s != 0);
            visited.insert(s);
            if (s == seed) {
                steps_to_return = i;
                break;
            }
        }
        CHECK(steps_to_return == 63);
        CHECK(visited.size() == 63);
    }
}

TEST_CASE("state zero is rejected") {
    CHECK_THROWS_AS(Lfsr6(0), ZeroStateError);
    CHECK_THROWS_AS(Lfsr6(64), ZeroStateError);
    CHECK_THROWS_AS(Lfsr6(1, {}), ConfigError);
    CHECK_THROWS_AS(Lfsr6(1, {0}), ConfigError);
    CHECK_THROWS_AS(Lfsr6(1, {7}), ConfigError);
}

TEST_CASE("determinism: same seed and taps give the same sequence") {
    Lfsr6 a(17), b(17);
    for (int i = 0; i < 100; ++i)
        CHECK(a.step() == b.step());
}

TEST_CASE("non-maximal taps still cycle within the nonzero states") {
    // x^6 + x^4 + x^2 + x (taps {6,4,2,1}) is not primitive; the period must
    // divide 63... or at least never reach zero. Only the no-zero claim is
    // generic, so assert that plus eventual return.
    Lfsr6 lfsr(5, {6, 3});
    std::set<uint8_t> seen;
    for (int i = 0; i < 256; ++i) {
        const uint8_t s = lfsr.step();
        CHECK(s != 0);
        seen.insert(s);
    }
    CHECK(seen.size() <= 63);
}

TEST_CASE("weight mapping: fixed table on the Fix_4_3 grid") {
    // grid index = state mod 7, value = (index - 3) * 0.125
    CHECK(Lfsr6::weight_from_state(1).to_double() == -0.25);
    CHECK(Lfsr6::weight_from_state(3).to_double() == 0.0);
    CHECK(Lfsr6::weight_from_state(6).to_double() == 0.375);
    CHECK(Lfsr6::weight_from_state(7).to_double() == -0.375);
    CHECK(Lfsr6::weight_from_state(63).to_double() == 0.0);

    // pure function of state
    CHECK(Lfsr6::weight_from_state(20).raw() == Lfsr6::weight_from_state(20).raw());
}

TEST_CASE("weights stay on the grid and inside +/-0.4") {
    Lfsr6 lfsr(1);
    for (int i = 0; i < 200; ++i) {
        const fx::Value w = lfsr.sample_weight();
        CHECK(w.fmt() == fx::kFix4_3);
        CHECK(w.raw() >= -3);
        CHECK(w.raw() <= 3);
        CHECK(std::abs(w.to_double()) <= 0.4);
    }
}

TEST_CASE("full-period histogram: each grid value exactly 9 times") {
    Lfsr6 lfsr(1);
    std::map<int32_t, int> histogram;
    for (int i = 0; i < 63; ++i)
        ++histogram[lfsr.sample_weight().raw()];
    CHECK(histogram.size() == 7);
    for (const auto& [raw, count] : histogram)
        CHECK(count == 9);
}

TEST_CASE("draw_weights pre-draws the same sequence as stepping") {
    Lfsr6 a(33), b(33);
    const auto drawn = a.draw_weights(16);
    for (const fx::Value& w : drawn)
        CHECK(w.raw() == b.sample_weight().raw());
}
