#ifndef GLAB_KERNELS_HPP
#define GLAB_KERNELS_HPP

#include <cstddef>

// Data-parallel inner loops used by the norm oracles, the LP pivot updates
// and the Monte Carlo reducers. Scalar reference kernels always exist; an
// AVX2 variant is selected once at startup when the CPU supports it.

namespace glab::kernels {

struct Ops {
    // sum_i a[i]*b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double* y, double alpha, const double* x, std::size_t n);
    // max_j |<row_j, y>| over an m x n row-major matrix
    double (*max_abs_dot)(const double* rows, std::size_t m, std::size_t n,
                          const double* y);
    // sum_j |<row_j, y>|
    double (*sum_abs_dot)(const double* rows, std::size_t m, std::size_t n,
                          const double* y);
    const char* name;
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double* y, double alpha, const double* x, std::size_t n);
double max_abs_dot(const double* rows, std::size_t m, std::size_t n, const double* y);
double sum_abs_dot(const double* rows, std::size_t m, std::size_t n, const double* y);
}  // namespace scalar

#ifdef GLAB_BUILD_AVX2
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double* y, double alpha, const double* x, std::size_t n);
double max_abs_dot(const double* rows, std::size_t m, std::size_t n, const double* y);
double sum_abs_dot(const double* rows, std::size_t m, std::size_t n, const double* y);
}  // namespace avx2
#endif

// Active implementation, chosen at static init from CPU features.
const Ops& active();
const Ops& scalar_ops();
#ifdef GLAB_BUILD_AVX2
const Ops& avx2_ops();
#endif
bool avx2_available();

inline double dot(const double* a, const double* b, std::size_t n) {
    return active().dot(a, b, n);
}
inline void axpy(double* y, double alpha, const double* x, std::size_t n) {
    active().axpy(y, alpha, x, n);
}
inline double max_abs_dot(const double* rows, std::size_t m, std::size_t n,
                          const double* y) {
    return active().max_abs_dot(rows, m, n, y);
}
inline double sum_abs_dot(const double* rows, std::size_t m, std::size_t n,
                          const double* y) {
    return active().sum_abs_dot(rows, m, n, y);
}

}  // namespace glab::kernels

#endif
