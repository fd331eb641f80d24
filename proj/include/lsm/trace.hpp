#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace lsm {

// Membrane potentials over a run, one row per step, one column per neuron.
// The fixed-point engine also records the raw bit patterns so determinism
// can be asserted bit-for-bit.
class StateTrace {
public:
    StateTrace() = default;
    StateTrace(size_t steps, size_t neurons, bool with_raw)
        : steps_(steps), neurons_(neurons), values_(steps * neurons, 0.0) {
        if (with_raw)
            raw_.assign(steps * neurons, 0);
    }

    size_t steps() const { return steps_; }
    size_t neurons() const { return neurons_; }
    bool has_raw() const { return !raw_.empty(); }

    double at(size_t t, size_t n) const { return values_[t * neurons_ + n]; }
    int32_t raw_at(size_t t, size_t n) const { return raw_[t * neurons_ + n]; }

    void set(size_t t, size_t n, double v) { values_[t * neurons_ + n] = v; }
    void set_raw(size_t t, size_t n, int32_t r) { raw_[t * neurons_ + n] = r; }

    const std::vector<double>& values() const { return values_; }
    const std::vector<int32_t>& raw() const { return raw_; }

    // Header row of neuron ids (n0..nK), then one row of volts per step.
    void write_csv(const std::filesystem::path& path) const;
    static StateTrace read_csv(const std::filesystem::path& path);

private:
    size_t steps_ = 0;
    size_t neurons_ = 0;
    std::vector<double> values_;
    std::vector<int32_t> raw_;
};

} // namespace lsm
