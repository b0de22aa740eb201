#include "glab/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace glab::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

const __m256d kAbsMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double* y, double alpha, const double* x, std::size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double max_abs_dot(const double* rows, std::size_t m, std::size_t n, const double* y) {
    // Small n dominates here (n <= 64); vectorize across rows for tiny n
    // would need a transpose, so keep per-row dot.
    double best = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double v = std::fabs(dot(rows + j * n, y, n));
        if (v > best) best = v;
    }
    return best;
}

double sum_abs_dot(const double* rows, std::size_t m, std::size_t n, const double* y) {
    double s = 0.0;
    std::size_t j = 0;
    if (n >= 4) {
        for (; j + 4 <= m; j += 4) {
            __m256d acc0 = _mm256_setzero_pd();
            __m256d acc1 = _mm256_setzero_pd();
            __m256d acc2 = _mm256_setzero_pd();
            __m256d acc3 = _mm256_setzero_pd();
            const double* r0 = rows + (j + 0) * n;
            const double* r1 = rows + (j + 1) * n;
            const double* r2 = rows + (j + 2) * n;
            const double* r3 = rows + (j + 3) * n;
            std::size_t i = 0;
            for (; i + 4 <= n; i += 4) {
                __m256d vy = _mm256_loadu_pd(y + i);
                acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(r0 + i), vy, acc0);
                acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(r1 + i), vy, acc1);
                acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(r2 + i), vy, acc2);
                acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(r3 + i), vy, acc3);
            }
            double d0 = hsum(acc0), d1 = hsum(acc1), d2 = hsum(acc2), d3 = hsum(acc3);
            for (; i < n; ++i) {
                d0 += r0[i] * y[i];
                d1 += r1[i] * y[i];
                d2 += r2[i] * y[i];
                d3 += r3[i] * y[i];
            }
            s += std::fabs(d0) + std::fabs(d1) + std::fabs(d2) + std::fabs(d3);
        }
    }
    for (; j < m; ++j) s += std::fabs(dot(rows + j * n, y, n));
    return s;
}

}  // namespace glab::kernels::avx2
