#include "lsm/kernels.hpp"

#include "lsm/fxp.hpp"

namespace lsm::kern {

namespace {

void synapse_batch_scalar(const SynapseBatch& b) {
    for (size_t i = 0; i < b.n; ++i) {
        const int32_t counter = b.counters[i] + (b.src_spikes[i] ? 1 : 0);
        const int32_t s = b.samples[i];
        const int32_t w = b.weights[i];
        const bool pass = b.modes[i] ? (std::abs(s) <= std::abs(w)) : (s == w);
        const bool fired = pass && counter >= b.targets[i];
        if (fired) {
            b.out_counters[i] = 0;
            b.out_contrib[i] = w > 0 ? b.contrib_mag : (w < 0 ? -b.contrib_mag : 0);
        } else {
            b.out_counters[i] = counter;
            b.out_contrib[i] = 0;
        }
    }
}

void membrane_batch_scalar(const MembraneBatch& b) {
    using fx::detail::clamp_raw;
    using fx::detail::rshift_round_even;
    for (size_t i = 0; i < b.n; ++i) {
        if (b.refractory[i] > 0) {
            b.out_v_m[i] = b.v_m[i];
            b.out_refractory[i] = b.refractory[i] - 1;
            b.out_spikes[i] = 0;
            continue;
        }
        const int64_t excess =
            clamp_raw(int64_t(b.v_m[i]) - b.v_reset, b.raw_min, b.raw_max, nullptr);
        const int64_t leak = clamp_raw(rshift_round_even(excess * b.decay, b.frac_bits),
                                       b.raw_min, b.raw_max, nullptr);
        const int64_t integrated =
            clamp_raw(int64_t(b.v_m[i]) + b.v_s[i], b.raw_min, b.raw_max, nullptr);
        const int64_t candidate = clamp_raw(integrated + leak, b.raw_min, b.raw_max, nullptr);
        if (candidate >= b.v_threshold) {
            b.out_v_m[i] = b.v_reset;
            b.out_refractory[i] = b.refractory_steps;
            b.out_spikes[i] = 1;
        } else {
            b.out_v_m[i] = int32_t(candidate);
            b.out_refractory[i] = 0;
            b.out_spikes[i] = 0;
        }
    }
}

double dot_scalar(const double* a, const double* b, size_t n) {
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i)
        sum += a[i] * b[i];
    return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i)
        y[i] += alpha * x[i];
}

} // namespace

const Ops& scalar() {
    static const Ops ops{"scalar", synapse_batch_scalar, membrane_batch_scalar, dot_scalar,
                         axpy_scalar};
    return ops;
}

} // namespace lsm::kern
