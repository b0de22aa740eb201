#include "glab/kernels.hpp"

#include <cmath>

namespace glab::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double* y, double alpha, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double max_abs_dot(const double* rows, std::size_t m, std::size_t n, const double* y) {
    double best = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double v = std::fabs(dot(rows + j * n, y, n));
        if (v > best) best = v;
    }
    return best;
}

double sum_abs_dot(const double* rows, std::size_t m, std::size_t n, const double* y) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += std::fabs(dot(rows + j * n, y, n));
    return s;
}

}  // namespace scalar

const Ops& scalar_ops() {
    static const Ops ops{scalar::dot, scalar::axpy, scalar::max_abs_dot,
                         scalar::sum_abs_dot, "scalar"};
    return ops;
}

#ifdef GLAB_BUILD_AVX2
const Ops& avx2_ops() {
    static const Ops ops{avx2::dot, avx2::axpy, avx2::max_abs_dot,
                         avx2::sum_abs_dot, "avx2"};
    return ops;
}
#endif

bool avx2_available() {
#if defined(GLAB_BUILD_AVX2) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops& active() {
#ifdef GLAB_BUILD_AVX2
    static const Ops& chosen = avx2_available() ? avx2_ops() : scalar_ops();
#else
    static const Ops& chosen = scalar_ops();
#endif
    return chosen;
}

}  // namespace glab::kernels
