#include <doctest.h>

#include <cmath>
#include <random>

#include "lsm/fxp.hpp"

using namespace lsm;
using fx::Format;
using fx::Overflow;
using fx::Value;

namespace {

// Independent oracle: arbitrary-precision integer arithmetic. __int128 is
// exact for every product/sum of <=32-bit raws, so it plays the big-integer
// role at these widths.
__int128 oracle_add(int64_t a, int64_t b) {
    return __int128(a) + b;
}

__int128 oracle_mul(int64_t a, int64_t b) {
    return __int128(a) * b;
}

// round-half-even of p / 2^k over exact integers
int64_t oracle_round_shift(__int128 p, int k) {
    if (k == 0)
        return int64_t(p);
    const __int128 unit = __int128(1) << k;
    __int128 fl = p >> k; // arithmetic: floor
    const __int128 rem = p - fl * unit;
    const __int128 half = unit >> 1;
    if (rem > half)
        ++fl;
    else if (rem == half && (fl & 1))
        ++fl;
    return int64_t(fl);
}

int64_t clamp64(__int128 v, int64_t lo, int64_t hi) {
    if (v < lo) return lo;
    if (v > hi) return hi;
    return int64_t(v);
}

} // namespace

TEST_CASE("format parsing and ranges") {
    const Format f = Format::parse("Fix_18_12");
    CHECK(f.total == 18);
    CHECK(f.frac == 12);
    CHECK(f.str() == "Fix_18_12");
    CHECK(f.raw_min() == -131072);
    CHECK(f.raw_max() == 131071);
    CHECK(f.step() == doctest::Approx(1.0 / 4096.0));

    CHECK(Format::parse("Fix_4_3") == fx::kFix4_3);
    CHECK_THROWS_AS(Format::parse("Fix_33_2"), ConfigError);
    CHECK_THROWS_AS(Format::parse("Fix_8_8"), ConfigError);
    CHECK_THROWS_AS(Format::parse("Q8.4"), ConfigError);
    CHECK_THROWS_AS(Format::parse("Fix_8"), ConfigError);
}

TEST_CASE("quantize examples") {
    CHECK(fx::quantize(0.15, fx::kFix18_12).raw() == 614);
    CHECK(fx::quantize(0.15, fx::kFix18_12).to_double() == doctest::Approx(0.149902).epsilon(1e-5));
    CHECK(fx::quantize(0.0, fx::kFix18_12).raw() == 0);
    CHECK(fx::quantize(0.0, fx::kFix4_3).raw() == 0);
    CHECK(fx::quantize(0.001, fx::kFix18_12).raw() == 4);
    CHECK(fx::quantize(0.001, fx::kFix18_12).to_double() == 0.0009765625);
    CHECK(fx::quantize(-0.11, fx::kFix18_12).raw() == -451);
}

TEST_CASE("quantize saturation and error policy") {
    const Format f = fx::kFix4_3; // range [-1, 0.875]
    CHECK(fx::quantize(5.0, f, Overflow::Saturate).raw() == f.raw_max());
    CHECK(fx::quantize(-5.0, f, Overflow::Saturate).raw() == f.raw_min());
    CHECK_THROWS_AS(fx::quantize(5.0, f, Overflow::Error), RangeError);
    CHECK_THROWS_AS(fx::quantize(-5.0, f, Overflow::Error), RangeError);
    CHECK_NOTHROW(fx::quantize(0.875, f, Overflow::Error));
    // enormous inputs saturate without overflowing the conversion
    CHECK(fx::quantize(1e300, fx::kFix18_12).raw() == 131071);
    CHECK(fx::quantize(-1e300, fx::kFix18_12).raw() == -131072);
    CHECK_THROWS_AS(fx::quantize(std::nan(""), f), RangeError);
}

TEST_CASE("quantize rounds half to even") {
    // 0.5 quantum ties in Fix_4_3: x = (raw + 0.5) * 0.125
    CHECK(fx::quantize(0.0625, fx::kFix4_3).raw() == 0);  // tie between 0 and 1 -> 0
    CHECK(fx::quantize(0.1875, fx::kFix4_3).raw() == 2);  // tie between 1 and 2 -> 2
    CHECK(fx::quantize(-0.0625, fx::kFix4_3).raw() == 0); // tie between -1 and 0 -> 0
    CHECK(fx::quantize(-0.1875, fx::kFix4_3).raw() == -2);
}

TEST_CASE("add/sub/neg examples") {
    const Value a(614, fx::kFix18_12);
    const Value b(4, fx::kFix18_12);
    CHECK(fx::add(a, b).raw() == 618);

    const Value max(fx::kFix18_12.raw_max() == 131071 ? 131071 : 0, fx::kFix18_12);
    bool sat = false;
    CHECK(fx::add(max, max, &sat).raw() == 131071);
    CHECK(sat);

    CHECK(fx::add(Value(-4096, fx::kFix18_12), Value(4096, fx::kFix18_12)).raw() == 0);
    CHECK(fx::sub(b, b).raw() == 0);
    CHECK(fx::neg(Value(614, fx::kFix18_12)).raw() == -614);

    sat = false;
    CHECK(fx::neg(Value(int32_t(fx::kFix18_12.raw_min()), fx::kFix18_12), &sat).raw() == 131071);
    CHECK(sat);

    CHECK_THROWS_AS(fx::add(a, Value(1, fx::kFix4_3)), ConfigError);
}

TEST_CASE("shr semantics") {
    CHECK(fx::shr(fx::quantize(1.0, fx::kFix18_12), 3).to_double() == 0.125);
    CHECK(fx::shr(Value(0, fx::kFix18_12), 5).raw() == 0);
    // arithmetic shift: floor semantics at -1
    CHECK(fx::shr(Value(-1, fx::kFix18_12), 3).raw() == -1);
    for (int32_t raw : {-4096, -17, -1, 0, 1, 17, 4096}) {
        for (int k = 0; k < 8; ++k) {
            const int64_t expected = int64_t(std::floor(double(raw) / std::pow(2.0, k)));
            CHECK(fx::shr(Value(raw, fx::kFix18_12), k).raw() == expected);
        }
    }
    CHECK_THROWS_AS(fx::shr(Value(1, fx::kFix18_12), 18), ConfigError);
    CHECK_THROWS_AS(fx::shr(Value(1, fx::kFix18_12), -1), ConfigError);
}

TEST_CASE("mul_const examples") {
    const Value one = fx::quantize(1.0, fx::kFix18_12);
    const Value decay = fx::quantize(-0.11, fx::kFix18_12);
    const Value product = fx::mul_const(one, decay);
    CHECK(product.raw() == -451);
    CHECK(product.to_double() == -0.110107421875);

    CHECK(fx::mul_const(Value(1234, fx::kFix18_12), Value(0, fx::kFix18_12)).raw() == 0);
    CHECK(fx::mul_const(Value(1234, fx::kFix18_12), one).raw() == 1234);
    CHECK(fx::mul_const(Value(-777, fx::kFix18_12), one).raw() == -777);

    // cross-format: membrane value times a Fix_4_3 weight
    const Value w = fx::quantize(0.375, fx::kFix4_3);
    CHECK(fx::mul_const(one, w).to_double() == 0.375);
}

TEST_CASE("round trip: value(raw) requantizes to raw") {
    for (const Format f : {fx::kFix4_3, Format{8, 5}, fx::kFix18_12}) {
        if (f.total <= 8) {
            for (int64_t raw = f.raw_min(); raw <= f.raw_max(); ++raw) {
                const Value v(int32_t(raw), f);
                CHECK(fx::quantize(v.to_double(), f).raw() == raw);
            }
        }
    }
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int64_t> dist(fx::kFix18_12.raw_min(),
                                                fx::kFix18_12.raw_max());
    for (int i = 0; i < 2000; ++i) {
        const int64_t raw = dist(rng);
        CHECK(fx::quantize(Value(int32_t(raw), fx::kFix18_12).to_double(), fx::kFix18_12).raw() ==
              raw);
    }
}

TEST_CASE("monotonicity of quantize") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-40.0, 40.0);
    for (int i = 0; i < 2000; ++i) {
        double x = dist(rng), y = dist(rng);
        if (x > y)
            std::swap(x, y);
        CHECK(fx::quantize(x, fx::kFix18_12).raw() <= fx::quantize(y, fx::kFix18_12).raw());
    }
}

TEST_CASE("quantization error bound") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> dist(-30.0, 30.0);
    const double half_step = fx::kFix18_12.step() / 2.0;
    for (int i = 0; i < 5000; ++i) {
        const double x = dist(rng);
        const double err = std::abs(fx::quantize(x, fx::kFix18_12).to_double() - x);
        CHECK(err <= half_step + 1e-18);
    }
}

TEST_CASE("integer oracle: add/sub agree when no saturation; clamp when saturating") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int64_t> dist(fx::kFix18_12.raw_min(),
                                                fx::kFix18_12.raw_max());
    const int64_t lo = fx::kFix18_12.raw_min(), hi = fx::kFix18_12.raw_max();
    for (int i = 0; i < 20000; ++i) {
        const int64_t a = dist(rng), b = dist(rng);
        const Value va(int32_t(a), fx::kFix18_12), vb(int32_t(b), fx::kFix18_12);
        CHECK(fx::add(va, vb).raw() == clamp64(oracle_add(a, b), lo, hi));
        CHECK(fx::sub(va, vb).raw() == clamp64(oracle_add(a, -b), lo, hi));
    }
}

TEST_CASE("integer oracle: mul_const requantization") {
    std::mt19937_64 rng(19);
    std::uniform_int_distribution<int64_t> dist(fx::kFix18_12.raw_min(),
                                                fx::kFix18_12.raw_max());
    std::uniform_int_distribution<int64_t> wdist(fx::kFix4_3.raw_min(), fx::kFix4_3.raw_max());
    const int64_t lo = fx::kFix18_12.raw_min(), hi = fx::kFix18_12.raw_max();
    for (int i = 0; i < 20000; ++i) {
        const int64_t a = dist(rng);
        const int64_t c = dist(rng);
        const Value va(int32_t(a), fx::kFix18_12), vc(int32_t(c), fx::kFix18_12);
        const int64_t expected = clamp64(oracle_round_shift(oracle_mul(a, c), 12), lo, hi);
        CHECK(fx::mul_const(va, vc).raw() == expected);

        const int64_t w = wdist(rng);
        const Value vw(int32_t(w), fx::kFix4_3);
        const int64_t expected_w = clamp64(oracle_round_shift(oracle_mul(a, w), 3), lo, hi);
        CHECK(fx::mul_const(va, vw).raw() == expected_w);
    }
}

TEST_CASE("shr value identity and composition") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int64_t> dist(fx::kFix18_12.raw_min(),
                                                fx::kFix18_12.raw_max());
    for (int i = 0; i < 5000; ++i) {
        const int64_t raw = dist(rng);
        const Value v(int32_t(raw), fx::kFix18_12);
        std::uniform_int_distribution<int> kdist(0, 8);
        const int j = kdist(rng), k = kdist(rng);
        CHECK(fx::shr(fx::shr(v, j), k).raw() == fx::shr(v, j + k).raw());
        CHECK(fx::shr(v, j).raw() == int64_t(std::floor(std::ldexp(double(raw), -j))));
    }
}
