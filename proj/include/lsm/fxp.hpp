#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "lsm/errors.hpp"

namespace lsm::fx {

// Signed two's-complement fixed-point format: `total` bits, `frac` of them
// fractional. Real value of a raw pattern r is r * 2^-frac.
struct Format {
    uint8_t total = 18;
    uint8_t frac = 12;

    constexpr bool operator==(const Format&) const = default;

    constexpr int64_t raw_min() const { return -(int64_t{1} << (total - 1)); }
    constexpr int64_t raw_max() const { return (int64_t{1} << (total - 1)) - 1; }
    double step() const;       // 2^-frac
    double min_value() const;
    double max_value() const;

    // Throws ConfigError unless 2 <= total <= 32 and 0 <= frac < total.
    void validate() const;

    // "Fix_18_12" <-> {18, 12}
    static Format parse(std::string_view text);
    std::string str() const;
};

inline constexpr Format kFix18_12{18, 12};
inline constexpr Format kFix4_3{4, 3};

enum class Overflow { Saturate, Error };

// One fixed-point number: stored bit pattern plus its format.
class Value {
public:
    Value() = default;
    // Throws RangeError if raw does not fit the format.
    Value(int32_t raw, Format fmt);

    int32_t raw() const { return raw_; }
    Format fmt() const { return fmt_; }
    double to_double() const;

    bool operator==(const Value&) const = default;

private:
    int32_t raw_ = 0;
    Format fmt_ = kFix18_12;
};

// Round-to-nearest-even onto the format grid. Out-of-range input saturates
// to the range limit (Saturate) or throws RangeError (Error).
Value quantize(double x, Format fmt, Overflow policy = Overflow::Saturate);

// Saturating arithmetic on same-format values. The optional flag is set
// (never cleared) when the result clamped at a format limit.
Value add(Value a, Value b, bool* saturated = nullptr);
Value sub(Value a, Value b, bool* saturated = nullptr);
Value neg(Value a, bool* saturated = nullptr);

// Arithmetic shift right by k (floor division by 2^k). Requires 0 <= k < total.
Value shr(Value a, int k);

// Exact integer product re-quantized (round-to-nearest-even) to a's format,
// then saturated. The factors may carry different formats.
Value mul_const(Value a, Value c, bool* saturated = nullptr);

namespace detail {

// Shared integer semantics; the SIMD kernels mirror these bit-exactly.

inline int64_t clamp_raw(int64_t v, int64_t lo, int64_t hi, bool* saturated) {
    if (v < lo) {
        if (saturated) *saturated = true;
        return lo;
    }
    if (v > hi) {
        if (saturated) *saturated = true;
        return hi;
    }
    return v;
}

// round-half-to-even of p / 2^k. Branch-free form: add (half-1) plus the
// lowest kept bit, then arithmetic-shift.
inline int64_t rshift_round_even(int64_t p, int k) {
    if (k == 0) return p;
    const int64_t lsb = (p >> k) & 1;
    return (p + (int64_t{1} << (k - 1)) - 1 + lsb) >> k;
}

} // namespace detail

} // namespace lsm::fx
