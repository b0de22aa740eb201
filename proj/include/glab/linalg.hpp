#ifndef GLAB_LINALG_HPP
#define GLAB_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "glab/kernels.hpp"

namespace glab {

using Vec = std::vector<double>;

/// Dense row-major matrix. Kept deliberately small: the whole artifact works
/// with n <= 64 square operators and m x n sample matrices.
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    double* row(std::size_t i) { return a.data() + i * cols; }
    const double* row(std::size_t i) const { return a.data() + i * cols; }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Vec matvec(const Mat& m, const Vec& x) {
    Vec y(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        y[i] = kernels::dot(m.row(i), x.data(), m.cols);
    return y;
}

inline Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
    Mat c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k)
            kernels::axpy(c.row(i), a(i, k), b.row(k), b.cols);
    return c;
}

inline Mat transpose(const Mat& m) {
    Mat t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    return t;
}

inline double norm2(const Vec& v) { return std::sqrt(kernels::dot(v.data(), v.data(), v.size())); }

inline double norm1(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s;
}

inline double dot(const Vec& a, const Vec& b) { return kernels::dot(a.data(), b.data(), a.size()); }

inline void scale(Vec& v, double s) {
    for (double& x : v) x *= s;
}

/// Determinant by LU with partial pivoting.
inline double det_lu(const Mat& m) {
    if (m.rows != m.cols) throw std::invalid_argument("det_lu: square matrix required");
    std::size_t n = m.rows;
    Mat w = m;
    double d = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(w(i, k)) > std::fabs(w(p, k))) p = i;
        if (w(p, k) == 0.0) return 0.0;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(w(p, j), w(k, j));
            d = -d;
        }
        d *= w(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = w(i, k) / w(k, k);
            kernels::axpy(w.row(i) + k, -f, w.row(k) + k, n - k);
        }
    }
    return d;
}

/// Solve m x = b by Gaussian elimination with partial pivoting.
inline Vec solve_dense(Mat m, Vec b) {
    std::size_t n = m.rows;
    if (m.cols != n || b.size() != n) throw std::invalid_argument("solve_dense: shape mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(m(i, k)) > std::fabs(m(p, k))) p = i;
        if (std::fabs(m(p, k)) < 1e-300) throw std::runtime_error("solve_dense: singular matrix");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(k, j));
            std::swap(b[p], b[k]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = m(i, k) / m(k, k);
            kernels::axpy(m.row(i) + k, -f, m.row(k) + k, n - k);
            b[i] -= f * b[k];
        }
    }
    Vec x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return x;
}

inline Mat inverse(const Mat& m) {
    std::size_t n = m.rows;
    Mat inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        Vec e(n, 0.0);
        e[j] = 1.0;
        Vec col = solve_dense(m, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// values[k] pairs with the k-th row of vectors; A = Vᵀ diag(values) V.
struct SymEigen {
    Vec values;
    Mat vectors;  // rows are eigenvectors
};

inline SymEigen sym_eigen(Mat a, double tol = 1e-12, int max_sweeps = 100) {
    if (a.rows != a.cols) throw std::invalid_argument("sym_eigen: square matrix required");
    std::size_t n = a.rows;
    Mat v = Mat::identity(n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                (i == j ? diag : off) += a(i, j) * a(i, j);
        if (off <= tol * tol * (diag + 1e-300)) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vpk = v(p, k), vqk = v(q, k);
                    v(p, k) = c * vpk - s * vqk;
                    v(q, k) = s * vpk + c * vqk;
                }
            }
        }
    }
    SymEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
    out.vectors = v;
    return out;
}

/// Orthonormal basis of the row span of `rows` (modified Gram-Schmidt);
/// rows with residual below tol are dropped.
inline Mat orthonormal_rows(const Mat& rows, double tol = 1e-12) {
    std::vector<Vec> basis;
    for (std::size_t i = 0; i < rows.rows; ++i) {
        Vec v(rows.row(i), rows.row(i) + rows.cols);
        for (const Vec& b : basis) {
            double c = dot(v, b);
            kernels::axpy(v.data(), -c, b.data(), v.size());
        }
        double nv = norm2(v);
        if (nv > tol) {
            scale(v, 1.0 / nv);
            basis.push_back(v);
        }
    }
    Mat out(basis.size(), rows.cols);
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < rows.cols; ++j) out(i, j) = basis[i][j];
    return out;
}

/// Orthonormal basis of the orthogonal complement of the row span of `basis`
/// (rows of `basis` must already be orthonormal).
inline Mat orthonormal_complement(const Mat& basis, std::size_t ambient) {
    std::vector<Vec> comp;
    for (std::size_t k = 0; k < ambient && comp.size() < ambient - basis.rows; ++k) {
        Vec v(ambient, 0.0);
        v[k] = 1.0;
        for (std::size_t i = 0; i < basis.rows; ++i) {
            double c = kernels::dot(v.data(), basis.row(i), ambient);
            kernels::axpy(v.data(), -c, basis.row(i), ambient);
        }
        for (const Vec& b : comp) {
            double c = dot(v, b);
            kernels::axpy(v.data(), -c, b.data(), ambient);
        }
        double nv = norm2(v);
        if (nv > 1e-8) {
            scale(v, 1.0 / nv);
            comp.push_back(v);
        }
    }
    Mat out(comp.size(), ambient);
    for (std::size_t i = 0; i < comp.size(); ++i)
        for (std::size_t j = 0; j < ambient; ++j) out(i, j) = comp[i][j];
    return out;
}

}  // namespace glab

#endif
