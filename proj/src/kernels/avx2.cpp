// AVX2 variants of the batched kernels. Compiled with -mavx2 and entered
// only after a runtime cpuid check; must stay bit-exact with scalar.cpp for
// the integer kernels.

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include "lsm/kernels.hpp"

namespace lsm::kern::detail {

namespace {

// Scalar tails reuse the reference kernels on offset views.
SynapseBatch synapse_tail(const SynapseBatch& b, size_t off) {
    SynapseBatch t = b;
    t.n = b.n - off;
    t.counters += off;
    t.src_spikes += off;
    t.samples += off;
    t.weights += off;
    t.targets += off;
    t.modes += off;
    t.out_counters += off;
    t.out_contrib += off;
    return t;
}

MembraneBatch membrane_tail(const MembraneBatch& b, size_t off) {
    MembraneBatch t = b;
    t.n = b.n - off;
    t.v_m += off;
    t.v_s += off;
    t.refractory += off;
    t.out_v_m += off;
    t.out_refractory += off;
    t.out_spikes += off;
    return t;
}

inline __m256i clamp_epi32(__m256i v, __m256i lo, __m256i hi) {
    return _mm256_min_epi32(_mm256_max_epi32(v, lo), hi);
}

// Arithmetic shift right of 64-bit lanes (AVX2 has only the logical form).
inline __m256i sra_epi64(__m256i v, int k) {
    const __m128i count = _mm_cvtsi32_si128(k);
    const __m256i logical = _mm256_srl_epi64(v, count);
    const __m256i sign = _mm256_cmpgt_epi64(_mm256_setzero_si256(), v);
    const __m256i fill = _mm256_sll_epi64(sign, _mm_cvtsi32_si128(64 - k));
    return _mm256_or_si256(logical, fill);
}

// round-half-to-even of (p / 2^k) on 64-bit lanes; mirrors
// fx::detail::rshift_round_even.
inline __m256i rshift_round_even_epi64(__m256i p, int k) {
    const __m256i lsb =
        _mm256_and_si256(_mm256_srl_epi64(p, _mm_cvtsi32_si128(k)), _mm256_set1_epi64x(1));
    const __m256i bias = _mm256_set1_epi64x((int64_t{1} << (k - 1)) - 1);
    return sra_epi64(_mm256_add_epi64(p, _mm256_add_epi64(bias, lsb)), k);
}

// Collect the low dwords of two 4x64 vectors into one 8x32 vector.
inline __m256i narrow_epi64_pair(__m256i lo, __m256i hi) {
    const __m256i pick_lo = _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0);
    const __m256i pick_hi = _mm256_setr_epi32(0, 0, 0, 0, 0, 2, 4, 6);
    const __m256i a = _mm256_permutevar8x32_epi32(lo, pick_lo);
    const __m256i b = _mm256_permutevar8x32_epi32(hi, pick_hi);
    return _mm256_blend_epi32(a, b, 0xf0);
}

void synapse_batch_avx2(const SynapseBatch& b) {
    const __m256i ones = _mm256_set1_epi32(1);
    const __m256i mag = _mm256_set1_epi32(b.contrib_mag);
    size_t i = 0;
    for (; i + 8 <= b.n; i += 8) {
        const __m256i cnt0 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.counters + i));
        const __m256i spk = _mm256_cvtepu8_epi32(
            _mm_loadl_epi64(reinterpret_cast<const __m128i*>(b.src_spikes + i)));
        const __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.samples + i));
        const __m256i w = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.weights + i));
        const __m256i tgt = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.targets + i));
        const __m256i mode = _mm256_cvtepu8_epi32(
            _mm_loadl_epi64(reinterpret_cast<const __m128i*>(b.modes + i)));

        const __m256i cnt = _mm256_add_epi32(cnt0, spk);
        const __m256i pass_thr = _mm256_xor_si256(
            _mm256_cmpgt_epi32(_mm256_abs_epi32(s), _mm256_abs_epi32(w)),
            _mm256_set1_epi32(-1));
        const __m256i pass_eq = _mm256_cmpeq_epi32(s, w);
        const __m256i mode_mask = _mm256_cmpgt_epi32(mode, _mm256_setzero_si256());
        const __m256i pass = _mm256_blendv_epi8(pass_eq, pass_thr, mode_mask);
        const __m256i reached = _mm256_cmpgt_epi32(cnt, _mm256_sub_epi32(tgt, ones));
        const __m256i fired = _mm256_and_si256(pass, reached);

        const __m256i contrib = _mm256_and_si256(fired, _mm256_sign_epi32(mag, w));
        const __m256i cnt_out = _mm256_andnot_si256(fired, cnt);

        _mm256_storeu_si256(reinterpret_cast<__m256i*>(b.out_counters + i), cnt_out);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(b.out_contrib + i), contrib);
    }
    if (i < b.n)
        scalar().synapse_batch(synapse_tail(b, i));
}

void membrane_batch_avx2(const MembraneBatch& b) {
    if (b.frac_bits == 0 || b.v_threshold == INT32_MIN) {
        scalar().membrane_batch(b);
        return;
    }
    const __m256i lo_lim = _mm256_set1_epi32(b.raw_min);
    const __m256i hi_lim = _mm256_set1_epi32(b.raw_max);
    const __m256i reset = _mm256_set1_epi32(b.v_reset);
    const __m256i thr_m1 = _mm256_set1_epi32(b.v_threshold - 1);
    const __m256i decay64 = _mm256_set1_epi64x(b.decay);
    const __m256i refr_set = _mm256_set1_epi32(b.refractory_steps);
    const __m256i zero = _mm256_setzero_si256();

    alignas(32) int32_t spike_lanes[8];
    size_t i = 0;
    for (; i + 8 <= b.n; i += 8) {
        const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.v_m + i));
        const __m256i vs = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.v_s + i));
        const __m256i refr = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.refractory + i));
        const __m256i in_refr = _mm256_cmpgt_epi32(refr, zero);

        // leak = round_even((v - reset) * decay >> frac), saturating at each stage
        const __m256i excess = clamp_epi32(_mm256_sub_epi32(v, reset), lo_lim, hi_lim);
        const __m256i ex_lo = _mm256_cvtepi32_epi64(_mm256_castsi256_si128(excess));
        const __m256i ex_hi = _mm256_cvtepi32_epi64(_mm256_extracti128_si256(excess, 1));
        const __m256i prod_lo = _mm256_mul_epi32(ex_lo, decay64);
        const __m256i prod_hi = _mm256_mul_epi32(ex_hi, decay64);
        const __m256i leak64_lo = rshift_round_even_epi64(prod_lo, b.frac_bits);
        const __m256i leak64_hi = rshift_round_even_epi64(prod_hi, b.frac_bits);
        const __m256i leak = clamp_epi32(narrow_epi64_pair(leak64_lo, leak64_hi), lo_lim, hi_lim);

        const __m256i integrated = clamp_epi32(_mm256_add_epi32(v, vs), lo_lim, hi_lim);
        const __m256i candidate = clamp_epi32(_mm256_add_epi32(integrated, leak), lo_lim, hi_lim);

        const __m256i spike = _mm256_andnot_si256(in_refr, _mm256_cmpgt_epi32(candidate, thr_m1));
        __m256i v_out = _mm256_blendv_epi8(candidate, reset, spike);
        __m256i refr_out = _mm256_blendv_epi8(zero, refr_set, spike);
        v_out = _mm256_blendv_epi8(v_out, v, in_refr);
        refr_out = _mm256_blendv_epi8(refr_out, _mm256_sub_epi32(refr, _mm256_set1_epi32(1)),
                                      in_refr);

        _mm256_storeu_si256(reinterpret_cast<__m256i*>(b.out_v_m + i), v_out);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(b.out_refractory + i), refr_out);
        _mm256_store_si256(reinterpret_cast<__m256i*>(spike_lanes), spike);
        for (int lane = 0; lane < 8; ++lane)
            b.out_spikes[i + lane] = spike_lanes[lane] ? 1 : 0;
    }
    if (i < b.n)
        scalar().membrane_batch(membrane_tail(b, i));
}

double dot_avx2(const double* a, const double* b, size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        acc1 = _mm256_add_pd(acc1,
                             _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc0 = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc0);
    double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i)
        sum += a[i] * b[i];
    return sum;
}

void axpy_avx2(double alpha, const double* x, double* y, size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d yi = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(yi, _mm256_mul_pd(a, _mm256_loadu_pd(x + i))));
    }
    for (; i < n; ++i)
        y[i] += alpha * x[i];
}

} // namespace

const Ops* avx2_ops() {
    static const Ops ops{"avx2", synapse_batch_avx2, membrane_batch_avx2, dot_avx2, axpy_avx2};
    return &ops;
}

} // namespace lsm::kern::detail

#endif // x86
