#include "ajk/kernels/kernels.hpp"

#include <immintrin.h>

#include <cstdint>

namespace ajk::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_squares(const double* a, std::size_t n) {
    return dot(a, a, n);
}

double masked_weighted_sse(const double* a, const double* b, const double* w,
                           const bool* observed, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        // Widen four bool bytes to a 64-bit lane mask.
        std::int32_t packed;
        __builtin_memcpy(&packed, observed + i, 4);
        const __m256i lanes = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(packed));
        const __m256d keep = _mm256_castsi256_pd(_mm256_cmpgt_epi64(lanes, _mm256_setzero_si256()));
        const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        // Masked-out lanes are zeroed before the multiply so NaN in a missing
        // cell never reaches the accumulator.
        const __m256d d = _mm256_and_pd(diff, keep);
        const __m256d wv = _mm256_and_pd(_mm256_loadu_pd(w + i), keep);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(wv, d), d, acc);
    }
    double total = hsum(acc);
    for (; i < n; ++i) {
        if (!observed[i]) continue;
        const double diff = a[i] - b[i];
        total += w[i] * diff * diff;
    }
    return total;
}

}  // namespace

const KernelTable& table() {
    static const KernelTable kTable{"avx2", &dot, &axpy, &sum_squares, &masked_weighted_sse};
    return kTable;
}

}  // namespace ajk::kernels::avx2
