#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lsm/fxp.hpp"
#include "lsm/kernels.hpp"
#include "lsm/neuron.hpp"

using namespace lsm;

namespace {

struct SynapseArrays {
    std::vector<int32_t> counters, samples, weights, targets;
    std::vector<uint8_t> spikes, modes;
    std::vector<int32_t> out_counters, out_contrib;

    explicit SynapseArrays(size_t n, uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int32_t> wdist(-3, 3);
        std::uniform_int_distribution<int32_t> cdist(0, 5);
        std::uniform_int_distribution<int32_t> tdist(1, 4);
        std::uniform_int_distribution<int> bit(0, 1);
        counters.resize(n);
        samples.resize(n);
        weights.resize(n);
        targets.resize(n);
        spikes.resize(n);
        modes.resize(n);
        out_counters.resize(n);
        out_contrib.resize(n);
        for (size_t i = 0; i < n; ++i) {
            counters[i] = cdist(rng);
            samples[i] = wdist(rng);
            weights[i] = wdist(rng);
            targets[i] = tdist(rng);
            spikes[i] = uint8_t(bit(rng));
            modes[i] = uint8_t(bit(rng));
        }
    }

    kern::SynapseBatch batch() {
        kern::SynapseBatch b;
        b.n = counters.size();
        b.counters = counters.data();
        b.src_spikes = spikes.data();
        b.samples = samples.data();
        b.weights = weights.data();
        b.targets = targets.data();
        b.modes = modes.data();
        b.contrib_mag = 512;
        b.out_counters = out_counters.data();
        b.out_contrib = out_contrib.data();
        return b;
    }
};

struct MembraneArrays {
    std::vector<int32_t> v_m, v_s, refr;
    std::vector<int32_t> out_v, out_refr;
    std::vector<uint8_t> out_spikes;

    explicit MembraneArrays(size_t n, uint64_t seed, bool extreme = false) {
        std::mt19937_64 rng(seed);
        const int32_t lo = int32_t(fx::kFix18_12.raw_min());
        const int32_t hi = int32_t(fx::kFix18_12.raw_max());
        std::uniform_int_distribution<int32_t> vdist(extreme ? lo : -8192,
                                                     extreme ? hi : 8192);
        std::uniform_int_distribution<int32_t> sdist(extreme ? lo : -4096,
                                                     extreme ? hi : 4096);
        std::uniform_int_distribution<int32_t> rdist(0, 2);
        v_m.resize(n);
        v_s.resize(n);
        refr.resize(n);
        out_v.resize(n);
        out_refr.resize(n);
        out_spikes.resize(n);
        for (size_t i = 0; i < n; ++i) {
            v_m[i] = vdist(rng);
            v_s[i] = sdist(rng);
            refr[i] = rdist(rng);
        }
    }

    kern::MembraneBatch batch() {
        kern::MembraneBatch b;
        b.n = v_m.size();
        b.v_m = v_m.data();
        b.v_s = v_s.data();
        b.refractory = refr.data();
        b.v_reset = 4;
        b.v_threshold = 614;
        b.decay = -451;
        b.refractory_steps = 1;
        b.frac_bits = 12;
        b.raw_min = int32_t(fx::kFix18_12.raw_min());
        b.raw_max = int32_t(fx::kFix18_12.raw_max());
        b.out_v_m = out_v.data();
        b.out_refractory = out_refr.data();
        b.out_spikes = out_spikes.data();
        return b;
    }
};

} // namespace

TEST_CASE("scalar synapse kernel matches the per-element semantics") {
    SynapseArrays arrays(133, 5);
    kern::scalar().synapse_batch(arrays.batch());
    for (size_t i = 0; i < 133; ++i) {
        SynapseConfig cfg;
        cfg.weight = fx::Value(arrays.weights[i], fx::kFix4_3);
        cfg.pulse_count_target = arrays.targets[i];
        cfg.compare_mode = arrays.modes[i] ? CompareMode::Threshold : CompareMode::Equality;
        const auto expected =
            synapse_step(cfg, arrays.counters[i], arrays.spikes[i] != 0,
                         fx::Value(arrays.samples[i], fx::kFix4_3), 3);
        CHECK(arrays.out_counters[i] == expected.counter);
        CHECK(arrays.out_contrib[i] == expected.contribution.raw());
    }
}

TEST_CASE("scalar membrane kernel matches the per-element semantics") {
    MembraneArrays arrays(77, 6);
    kern::scalar().membrane_batch(arrays.batch());
    NeuronParams params;
    for (size_t i = 0; i < 77; ++i) {
        NeuronState state;
        state.v_m = fx::Value(arrays.v_m[i], fx::kFix18_12);
        state.refractory_remaining = arrays.refr[i];
        const auto expected =
            membrane_step(params, state, fx::Value(arrays.v_s[i], fx::kFix18_12));
        CHECK(arrays.out_v[i] == expected.state.v_m.raw());
        CHECK(arrays.out_refr[i] == expected.state.refractory_remaining);
        CHECK(arrays.out_spikes[i] == (expected.spike ? 1 : 0));
    }
}

TEST_CASE("avx2 kernels are bit-exact against scalar") {
    const kern::Ops* simd = kern::avx2();
    if (!simd) {
        MESSAGE("AVX2 unavailable; skipping");
        return;
    }
    for (uint64_t seed = 0; seed < 20; ++seed) {
        for (size_t n : {1u, 7u, 8u, 9u, 64u, 133u}) {
            SynapseArrays a(n, seed), b(n, seed);
            kern::scalar().synapse_batch(a.batch());
            simd->synapse_batch(b.batch());
            CHECK(a.out_counters == b.out_counters);
            CHECK(a.out_contrib == b.out_contrib);

            MembraneArrays ma(n, seed), mb(n, seed);
            kern::scalar().membrane_batch(ma.batch());
            simd->membrane_batch(mb.batch());
            CHECK(ma.out_v == mb.out_v);
            CHECK(ma.out_refr == mb.out_refr);
            CHECK(ma.out_spikes == mb.out_spikes);
        }
    }
}

TEST_CASE("avx2 membrane kernel bit-exact at saturation extremes") {
    const kern::Ops* simd = kern::avx2();
    if (!simd) {
        MESSAGE("AVX2 unavailable; skipping");
        return;
    }
    for (uint64_t seed = 100; seed < 110; ++seed) {
        MembraneArrays ma(64, seed, true), mb(64, seed, true);
        kern::scalar().membrane_batch(ma.batch());
        simd->membrane_batch(mb.batch());
        CHECK(ma.out_v == mb.out_v);
        CHECK(ma.out_refr == mb.out_refr);
        CHECK(ma.out_spikes == mb.out_spikes);
    }
}

TEST_CASE("f64 dot and axpy variants agree within accumulation tolerance") {
    const kern::Ops* simd = kern::avx2();
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (size_t n : {1u, 3u, 4u, 7u, 8u, 40u, 41u, 1000u}) {
        std::vector<double> a(n), b(n);
        for (size_t i = 0; i < n; ++i) {
            a[i] = dist(rng);
            b[i] = dist(rng);
        }
        const double expected = kern::scalar().dot(a.data(), b.data(), n);
        if (simd) {
            const double got = simd->dot(a.data(), b.data(), n);
            CHECK(got == doctest::Approx(expected).epsilon(1e-12));
        }
        std::vector<double> y1(n, 0.5), y2(n, 0.5);
        kern::scalar().axpy(0.75, a.data(), y1.data(), n);
        if (simd) {
            simd->axpy(0.75, a.data(), y2.data(), n);
            for (size_t i = 0; i < n; ++i)
                CHECK(y1[i] == y2[i]); // same elementwise expression
        }
    }
}

TEST_CASE("kernel selection") {
    kern::select("scalar");
    CHECK(std::string(kern::active().name) == "scalar");
    if (kern::avx2()) {
        kern::select("avx2");
        CHECK(std::string(kern::active().name) == "avx2");
    }
    CHECK_THROWS_AS(kern::select("neon"), ConfigError);
    kern::select("auto");
}
