#include "lsm/fxp.hpp"

#include <cmath>
#include <charconv>

namespace lsm::fx {

double Format::step() const {
    return std::ldexp(1.0, -int(frac));
}

double Format::min_value() const {
    return double(raw_min()) * step();
}

double Format::max_value() const {
    return double(raw_max()) * step();
}

void Format::validate() const {
    if (total < 2 || total > 32)
        throw ConfigError("fixed-point format: total bits must be in [2,32], got " +
                          std::to_string(int(total)));
    if (frac >= total)
        throw ConfigError("fixed-point format: frac bits (" + std::to_string(int(frac)) +
                          ") must be < total bits (" + std::to_string(int(total)) + ")");
}

Format Format::parse(std::string_view text) {
    constexpr std::string_view prefix = "Fix_";
    if (text.substr(0, prefix.size()) != prefix)
        throw ConfigError("bad fixed-point format string: '" + std::string(text) + "'");
    std::string_view rest = text.substr(prefix.size());
    size_t sep = rest.find('_');
    if (sep == std::string_view::npos)
        throw ConfigError("bad fixed-point format string: '" + std::string(text) + "'");
    int total = 0, frac = 0;
    auto r1 = std::from_chars(rest.data(), rest.data() + sep, total);
    auto r2 = std::from_chars(rest.data() + sep + 1, rest.data() + rest.size(), frac);
    if (r1.ec != std::errc{} || r2.ec != std::errc{} ||
        r1.ptr != rest.data() + sep || r2.ptr != rest.data() + rest.size())
        throw ConfigError("bad fixed-point format string: '" + std::string(text) + "'");
    if (total < 2 || total > 32 || frac < 0 || frac >= total)
        throw ConfigError("unsupported fixed-point format: '" + std::string(text) + "'");
    Format f{uint8_t(total), uint8_t(frac)};
    f.validate();
    return f;
}

std::string Format::str() const {
    return "Fix_" + std::to_string(int(total)) + "_" + std::to_string(int(frac));
}

Value::Value(int32_t raw, Format fmt) : raw_(raw), fmt_(fmt) {
    fmt.validate();
    if (raw < fmt.raw_min() || raw > fmt.raw_max())
        throw RangeError("raw " + std::to_string(raw) + " does not fit " + fmt.str());
}

double Value::to_double() const {
    return std::ldexp(double(raw_), -int(fmt_.frac));
}

Value quantize(double x, Format fmt, Overflow policy) {
    fmt.validate();
    if (!std::isfinite(x))
        throw RangeError("cannot quantize non-finite value");
    const double scaled = std::ldexp(x, int(fmt.frac));
    int64_t raw;
    // Anything this large is far outside any <=32-bit format; skip the
    // integer conversion which would overflow.
    if (std::abs(scaled) >= double(int64_t{1} << 40)) {
        raw = scaled > 0 ? fmt.raw_max() + 1 : fmt.raw_min() - 1;
    } else {
        const double fl = std::floor(scaled);
        const double rem = scaled - fl;
        raw = int64_t(fl);
        if (rem > 0.5 || (rem == 0.5 && (raw & 1)))
            ++raw;
    }
    if (raw < fmt.raw_min() || raw > fmt.raw_max()) {
        if (policy == Overflow::Error)
            throw RangeError("value " + std::to_string(x) + " out of range for " + fmt.str());
        raw = raw < fmt.raw_min() ? fmt.raw_min() : fmt.raw_max();
    }
    return Value(int32_t(raw), fmt);
}

namespace {

void require_same_format(Value a, Value b, const char* op) {
    if (!(a.fmt() == b.fmt()))
        throw ConfigError(std::string(op) + ": operand formats differ (" +
                          a.fmt().str() + " vs " + b.fmt().str() + ")");
}

} // namespace

Value add(Value a, Value b, bool* saturated) {
    require_same_format(a, b, "add");
    const int64_t sum = int64_t(a.raw()) + int64_t(b.raw());
    return Value(int32_t(detail::clamp_raw(sum, a.fmt().raw_min(), a.fmt().raw_max(), saturated)),
                 a.fmt());
}

Value sub(Value a, Value b, bool* saturated) {
    require_same_format(a, b, "sub");
    const int64_t diff = int64_t(a.raw()) - int64_t(b.raw());
    return Value(int32_t(detail::clamp_raw(diff, a.fmt().raw_min(), a.fmt().raw_max(), saturated)),
                 a.fmt());
}

Value neg(Value a, bool* saturated) {
    const int64_t v = -int64_t(a.raw());
    return Value(int32_t(detail::clamp_raw(v, a.fmt().raw_min(), a.fmt().raw_max(), saturated)),
                 a.fmt());
}

Value shr(Value a, int k) {
    if (k < 0 || k >= int(a.fmt().total))
        throw ConfigError("shr: shift " + std::to_string(k) + " out of range for " + a.fmt().str());
    return Value(a.raw() >> k, a.fmt());
}

Value mul_const(Value a, Value c, bool* saturated) {
    const int64_t product = int64_t(a.raw()) * int64_t(c.raw());
    const int64_t requantized = detail::rshift_round_even(product, int(c.fmt().frac));
    return Value(int32_t(detail::clamp_raw(requantized, a.fmt().raw_min(), a.fmt().raw_max(),
                                           saturated)),
                 a.fmt());
}

} // namespace lsm::fx
