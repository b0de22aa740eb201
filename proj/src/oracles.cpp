#include "glab/oracles.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "glab/errors.hpp"
#include "glab/lowdim.hpp"

namespace glab {

namespace {

Mat symmetric_vertices(const Mat& generators) {
    Mat out(2 * generators.rows, generators.cols);
    for (std::size_t i = 0; i < generators.rows; ++i)
        for (std::size_t j = 0; j < generators.cols; ++j) {
            out(2 * i, j) = generators(i, j);
            out(2 * i + 1, j) = -generators(i, j);
        }
    return out;
}

double facet_norm(const Mat& normals, const double* z, std::size_t n) {
    return kernels::max_abs_dot(normals.a.data(), normals.rows, n, z);
}

// upper incomplete regularized gamma Q(a, x), NR-style series / CF split
double regularized_gamma_q(double a, double x) {
    if (x < 0 || a <= 0) throw InvalidInputError("regularized_gamma_q: bad arguments");
    if (x == 0) return 1.0;
    if (x < a + 1.0) {
        // P(a,x) by series, Q = 1 - P
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 10000; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        return 1.0 - p;
    }
    // Q(a,x) by Lentz continued fraction
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 10000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

OracleResult opnorm_sphere_oracle(const LinearMap& t, const VPolytope& a, const VPolytope& b,
                                  std::size_t directions, RngSeed seed) {
    if (a.n > 3 || b.n > 3)
        throw UnsupportedError("opnorm_sphere_oracle: n <= 3 only (facet enumeration)");
    if (!a.full_dimensional || !b.full_dimensional)
        throw InvalidInputError("opnorm_sphere_oracle: full-dimensional bodies required");
    Mat na = facet_normals_lowdim(symmetric_vertices(a.generators), a.n);
    Mat nb = facet_normals_lowdim(symmetric_vertices(b.generators), b.n);

    Rng rng(seed);
    double best = 0.0;
    Vec u(a.n), x(a.n);
    for (std::size_t d = 0; d < directions; ++d) {
        u = sphere_direction(rng, a.n);
        double norm_a = facet_norm(na, u.data(), a.n);
        if (norm_a <= 1e-300) continue;
        for (std::size_t i = 0; i < a.n; ++i) x[i] = u[i] / norm_a;  // boundary of A
        Vec tx = matvec(t.matrix, x);
        best = std::max(best, facet_norm(nb, tx.data(), b.n));
    }
    OracleResult r;
    r.value = best;
    r.method = "sphere_boundary_max";
    std::ostringstream res;
    res << "directions=" << directions;
    r.resolution = res.str();
    return r;
}

OracleResult bm_grid_oracle_2d(const VPolytope& x, const VPolytope& y,
                               std::size_t grid_resolution) {
    if (x.n != 2 || y.n != 2) throw UnsupportedError("bm_grid_oracle_2d: n = 2 only");
    if (grid_resolution < 8) throw InvalidInputError("bm_grid_oracle_2d: resolution >= 8");

    Mat vx = convex_hull_2d(symmetric_vertices(x.generators));
    Mat vy = convex_hull_2d(symmetric_vertices(y.generators));
    Mat nx = facet_normals_lowdim(symmetric_vertices(x.generators), 2);
    Mat ny = facet_normals_lowdim(symmetric_vertices(y.generators), 2);

    // ||T : X -> Y|| = max over vertices v of X of ||T v||_Y (facet max)
    auto norm_xy = [&](const double m[4]) {
        double best = 0;
        for (std::size_t i = 0; i < vx.rows; ++i) {
            double z0 = m[0] * vx(i, 0) + m[1] * vx(i, 1);
            double z1 = m[2] * vx(i, 0) + m[3] * vx(i, 1);
            double nrm = 0;
            for (std::size_t f = 0; f < ny.rows; ++f)
                nrm = std::max(nrm, std::fabs(ny(f, 0) * z0 + ny(f, 1) * z1));
            best = std::max(best, nrm);
        }
        return best;
    };
    auto norm_yx = [&](const double m[4]) {
        double best = 0;
        for (std::size_t i = 0; i < vy.rows; ++i) {
            double z0 = m[0] * vy(i, 0) + m[1] * vy(i, 1);
            double z1 = m[2] * vy(i, 0) + m[3] * vy(i, 1);
            double nrm = 0;
            for (std::size_t f = 0; f < nx.rows; ++f)
                nrm = std::max(nrm, std::fabs(nx(f, 0) * z0 + nx(f, 1) * z1));
            best = std::max(best, nrm);
        }
        return best;
    };

    const std::size_t res = grid_resolution;
    // odd counts on the shear/scale axes keep c = 0 and r = 1 on the grid
    const std::size_t nsym = res | 1;
    double best = std::numeric_limits<double>::infinity();
    const double shear_max = 2.0;
    const double log_scale_max = std::log(4.0);
    for (std::size_t it = 0; it < res; ++it) {
        double theta = M_PI * static_cast<double>(it) / static_cast<double>(res);
        double ct = std::cos(theta), st = std::sin(theta);
        for (std::size_t ic = 0; ic < nsym; ++ic) {
            double c = -shear_max + 2.0 * shear_max * static_cast<double>(ic) /
                                        static_cast<double>(nsym - 1);
            for (std::size_t ir = 0; ir < nsym; ++ir) {
                double lr = -log_scale_max + 2.0 * log_scale_max * static_cast<double>(ir) /
                                                 static_cast<double>(nsym - 1);
                double r = std::exp(lr);
                // T = R(theta) * [[1,c],[0,1]] * diag(r, 1/r), optionally * diag(1,-1)
                double base[4] = {r * ct, (c * ct - st) / r, r * st, (c * st + ct) / r};
                for (int refl = 0; refl < 2; ++refl) {
                    double m[4] = {base[0], refl ? -base[1] : base[1], base[2],
                                   refl ? -base[3] : base[3]};
                    double det = m[0] * m[3] - m[1] * m[2];
                    double inv[4] = {m[3] / det, -m[1] / det, -m[2] / det, m[0] / det};
                    double prod = norm_xy(m) * norm_yx(inv);
                    best = std::min(best, prod);
                }
            }
        }
    }
    OracleResult out;
    out.value = best;
    out.method = "sl2_grid";
    std::ostringstream resn;
    resn << "resolution=" << res << ",shear_max=" << shear_max
         << ",scale_max=" << std::exp(log_scale_max);
    out.resolution = resn.str();
    return out;
}

double gaussian_moment_oracle(double p) {
    if (p < 1.0) throw InvalidInputError("gaussian_moment_oracle: p >= 1 required");
    double log_moment =
        0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(M_PI);
    return std::exp(log_moment / p);
}

double chi2_tail_oracle(std::size_t n, double threshold) {
    if (n < 1) throw InvalidInputError("chi2_tail_oracle: n >= 1 required");
    if (threshold < 0) throw InvalidInputError("chi2_tail_oracle: threshold >= 0 required");
    return regularized_gamma_q(0.5 * static_cast<double>(n), 0.5 * threshold);
}

}  // namespace glab
