#include "resk/kernels.hpp"

#include <immintrin.h>

// AVX2/FMA variants. Four doubles per lane, scalar tail. Reductions keep four
// independent accumulators and fold at the end, so results can differ from the
// scalar kernels in the last bits only.
namespace resk::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

} // namespace

double reduce_sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i];
    return hsum(acc) + tail;
}

double reduce_dot(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i] * y[i];
    return hsum(acc) + tail;
}

double reduce_wsum_centered(const double* w, const double* a, double ca, std::size_t n) {
    const __m256d vca = _mm256_set1_pd(ca);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d da = _mm256_sub_pd(_mm256_loadu_pd(a + i), vca);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), da, acc);
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += w[i] * (a[i] - ca);
    return hsum(acc) + tail;
}

double reduce_wprod_centered(const double* w, const double* a, double ca,
                             const double* b, double cb, std::size_t n) {
    const __m256d vca = _mm256_set1_pd(ca);
    const __m256d vcb = _mm256_set1_pd(cb);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d da = _mm256_sub_pd(_mm256_loadu_pd(a + i), vca);
        const __m256d db = _mm256_sub_pd(_mm256_loadu_pd(b + i), vcb);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), da), db, acc);
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += w[i] * (a[i] - ca) * (b[i] - cb);
    return hsum(acc) + tail;
}

void elem_mul(double* out, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void accum_centered(double* out, const double* a, double ca, double coeff, std::size_t n) {
    const __m256d vca = _mm256_set1_pd(ca);
    const __m256d vc = _mm256_set1_pd(coeff);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d da = _mm256_sub_pd(_mm256_loadu_pd(a + i), vca);
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vc, da, _mm256_loadu_pd(out + i)));
    }
    for (; i < n; ++i) out[i] += coeff * (a[i] - ca);
}

void accum_centered_prod(double* out, const double* a, double ca,
                         const double* b, double cb, double coeff, std::size_t n) {
    const __m256d vca = _mm256_set1_pd(ca);
    const __m256d vcb = _mm256_set1_pd(cb);
    const __m256d vc = _mm256_set1_pd(coeff);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d da = _mm256_sub_pd(_mm256_loadu_pd(a + i), vca);
        const __m256d db = _mm256_sub_pd(_mm256_loadu_pd(b + i), vcb);
        const __m256d prod = _mm256_mul_pd(_mm256_mul_pd(vc, da), db);
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), prod));
    }
    for (; i < n; ++i) out[i] += coeff * (a[i] - ca) * (b[i] - cb);
}

} // namespace resk::kernels::avx2
