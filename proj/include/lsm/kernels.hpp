#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace lsm::kern {

// Batched inner loops of the simulator and the readout, provided as scalar
// reference kernels plus SIMD variants selected at runtime. The integer
// kernels are bit-exact replicas of the per-element fixed-point semantics in
// lsm::fx / lsm::neuron, so engine output is identical no matter which
// variant runs (asserted by the equivalence tests). The f64 kernels may
// differ from scalar in accumulation order only.

// One synchronous update of every synapse: count the incoming spike, gate on
// the pulse counter and the weight comparison, emit +/-contrib_mag on fire.
struct SynapseBatch {
    size_t n = 0;
    const int32_t* counters = nullptr;    // pulse counters
    const uint8_t* src_spikes = nullptr;  // 0/1 incoming bits
    const int32_t* samples = nullptr;     // per-step LFSR draws, weight-format raw
    const int32_t* weights = nullptr;     // stored weights, weight-format raw
    const int32_t* targets = nullptr;     // pulse_count_target
    const uint8_t* modes = nullptr;       // 0 = equality, 1 = threshold compare
    int32_t contrib_mag = 0;              // membrane-format raw of 2^-shift
    int32_t* out_counters = nullptr;
    int32_t* out_contrib = nullptr;       // membrane-format raw, 0 or +/-contrib_mag
};

// One synchronous membrane update for every neuron: leak toward v_reset,
// integrate, threshold-fire with reset + refractory hold.
struct MembraneBatch {
    size_t n = 0;
    const int32_t* v_m = nullptr;         // membrane raws
    const int32_t* v_s = nullptr;         // accumulated synaptic input raws
    const int32_t* refractory = nullptr;  // steps remaining
    int32_t v_reset = 0;
    int32_t v_threshold = 0;
    int32_t decay = 0;                    // membrane-format raw, in (-1, 0]
    int32_t refractory_steps = 0;
    int frac_bits = 12;
    int32_t raw_min = 0;
    int32_t raw_max = 0;
    int32_t* out_v_m = nullptr;
    int32_t* out_refractory = nullptr;
    uint8_t* out_spikes = nullptr;
};

struct Ops {
    const char* name;
    void (*synapse_batch)(const SynapseBatch&);
    void (*membrane_batch)(const MembraneBatch&);
    double (*dot)(const double* a, const double* b, size_t n);
    void (*axpy)(double alpha, const double* x, double* y, size_t n); // y += alpha*x
};

const Ops& scalar();

// nullptr when the binary lacks the AVX2 translation unit or the CPU lacks
// the instructions.
const Ops* avx2();

// Best available variant; LSM_KERNELS=scalar|avx2 in the environment forces
// a choice at first use.
const Ops& active();

// Force a variant ("auto", "scalar", "avx2"). Throws ConfigError for unknown
// or unavailable names.
void select(const std::string& name);

} // namespace lsm::kern
