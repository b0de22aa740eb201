#include "glab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "glab/errors.hpp"
#include "glab/lowdim.hpp"

namespace glab {

namespace {

constexpr double kJacobiTol = 1e-12;

// membership test for B as max over facet normals (n <= 3) or the LP norm
struct BodyMembership {
    const VPolytope* body;
    Mat facet_normals;  // empty when the LP path is used

    explicit BodyMembership(const VPolytope& b) : body(&b) {
        if (b.n <= 3 && b.full_dimensional) {
            Mat verts(2 * b.generators.rows, b.n);
            for (std::size_t i = 0; i < b.generators.rows; ++i)
                for (std::size_t j = 0; j < b.n; ++j) {
                    verts(2 * i, j) = b.generators(i, j);
                    verts(2 * i + 1, j) = -b.generators(i, j);
                }
            facet_normals = facet_normals_lowdim(verts, b.n);
        }
    }

    double norm(const Vec& z) const {
        if (facet_normals.rows > 0)
            return kernels::max_abs_dot(facet_normals.a.data(), facet_normals.rows, body->n,
                                        z.data());
        return minkowski_norm(*body, z);
    }
};

double spectral_norm_small(const Mat& t) {
    Mat g(t.cols, t.cols);
    for (std::size_t i = 0; i < t.cols; ++i)
        for (std::size_t j = 0; j < t.cols; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < t.rows; ++k) s += t(k, i) * t(k, j);
            g(i, j) = s;
        }
    SymEigen eig = sym_eigen(g);
    double m = 0;
    for (double v : eig.values) m = std::max(m, v);
    return std::sqrt(std::max(m, 0.0));
}

double op_metric(const Mat& a, const Mat& b) {
    Mat d = a;
    for (std::size_t i = 0; i < d.a.size(); ++i) d.a[i] -= b.a[i];
    return spectral_norm_small(d);
}

// rejection sampler for one ball member; returns false if the draw missed
bool sample_ball_member(const OperatorBallSpec& spec, Rng& rng, const BodyMembership* mem,
                        double column_radius, Mat* out) {
    std::size_t n = spec.n;
    Mat t(n, n);
    switch (spec.kind) {
        case BallKind::v_op: {
            for (double& v : t.a) v = rng.uniform(-1.0, 1.0);
            if (spectral_norm_small(t) > 1.0) return false;
            break;
        }
        case BallKind::v_b: {
            // columns sampled independently within the circumradius box
            Vec col(n);
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t i = 0; i < n; ++i) col[i] = rng.uniform(-column_radius,
                                                                         column_radius);
                if (mem->norm(col) > 1.0) return false;
                for (std::size_t i = 0; i < n; ++i) t(i, j) = col[i];
            }
            break;
        }
        case BallKind::m_b: {
            double sqrt_n = std::sqrt(static_cast<double>(n));
            Vec col(n);
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t i = 0; i < n; ++i)
                    col[i] = rng.uniform(-column_radius * sqrt_n, column_radius * sqrt_n);
                if (mem->norm(col) > sqrt_n) return false;
                for (std::size_t i = 0; i < n; ++i) t(i, j) = col[i];
            }
            double det = det_lu(t);
            if (std::fabs(det) <= 1e-12) return false;
            double s = std::pow(std::fabs(det), -1.0 / static_cast<double>(n));
            for (double& v : t.a) v *= s;
            // SL_n projection may push columns out of sqrt(n) B; re-check
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t i = 0; i < n; ++i) col[i] = t(i, j);
                if (mem->norm(col) > sqrt_n) return false;
            }
            break;
        }
    }
    *out = std::move(t);
    return true;
}

}  // namespace

LinearMap make_linear_map(Mat matrix) {
    if (matrix.rows != matrix.cols) throw InvalidInputError("make_linear_map: square required");
    for (double v : matrix.a)
        if (!std::isfinite(v)) throw InvalidInputError("make_linear_map: non-finite entry");
    const std::size_t n = matrix.rows;

    LinearMap t;
    t.n = n;
    t.matrix = matrix;
    t.determinant = det_lu(matrix);

    // one-sided Jacobi: orthogonalize the columns of A, accumulating V
    Mat a = matrix;
    Mat v = Mat::identity(n);  // rows are right singular vectors
    for (int sweep = 0; sweep < 100; ++sweep) {
        bool converged = true;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0, aqq = 0, apq = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    app += a(i, p) * a(i, p);
                    aqq += a(i, q) * a(i, q);
                    apq += a(i, p) * a(i, q);
                }
                if (std::fabs(apq) <= kJacobiTol * std::sqrt(app * aqq) + 1e-300) continue;
                converged = false;
                double theta = (aqq - app) / (2.0 * apq);
                double tt = (theta >= 0 ? 1.0 : -1.0) /
                            (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(tt * tt + 1.0);
                double s = tt * c;
                for (std::size_t i = 0; i < n; ++i) {
                    double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double vpi = v(p, i), vqi = v(q, i);
                    v(p, i) = c * vpi - s * vqi;
                    v(q, i) = s * vpi + c * vqi;
                }
            }
        }
        if (converged) break;
    }

    // column norms are the singular values; sort descending
    std::vector<std::size_t> order(n);
    Vec sv(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += a(i, j) * a(i, j);
        sv[j] = std::sqrt(s);
        order[j] = j;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return sv[x] > sv[y];
    });

    t.singular_values.resize(n);
    t.left_frame = Mat(n, n);
    t.right_frame = Mat(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        std::size_t j = order[r];
        t.singular_values[r] = sv[j];
        for (std::size_t i = 0; i < n; ++i) t.right_frame(r, i) = v(j, i);
        if (sv[j] > 1e-300) {
            for (std::size_t i = 0; i < n; ++i) t.left_frame(r, i) = a(i, j) / sv[j];
        }
    }
    // complete left frame for (near-)zero singular values
    for (std::size_t r = 0; r < n; ++r) {
        double len = std::sqrt(kernels::dot(t.left_frame.row(r), t.left_frame.row(r), n));
        if (len < 0.5) {
            Mat have(r, n);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < n; ++j) have(i, j) = t.left_frame(i, j);
            Mat comp = orthonormal_complement(orthonormal_rows(have), n);
            std::size_t next = 0;
            for (std::size_t rr = r; rr < n && next < comp.rows; ++rr) {
                double l2 = std::sqrt(
                    kernels::dot(t.left_frame.row(rr), t.left_frame.row(rr), n));
                if (l2 < 0.5) {
                    for (std::size_t j = 0; j < n; ++j) t.left_frame(rr, j) = comp(next, j);
                    ++next;
                }
            }
            break;
        }
    }
    return t;
}

double op_norm_polytopes(const LinearMap& t, const VPolytope& a, const VPolytope& b) {
    if (t.n != a.n || t.n != b.n) throw InvalidInputError("op_norm_polytopes: dim mismatch");
    double best = 0.0;
    Vec g(t.n), tg;
    for (std::size_t j = 0; j < a.generators.rows; ++j) {
        for (std::size_t i = 0; i < t.n; ++i) g[i] = a.generators(j, i);
        tg = matvec(t.matrix, g);
        best = std::max(best, minkowski_norm(b, tg));
    }
    return best;
}

LinearMap det_normalize(const LinearMap& s) {
    if (std::fabs(s.determinant) <= 1e-12)
        throw NumericalFailure("det_normalize: singular map");
    double f = std::pow(std::fabs(s.determinant), -1.0 / static_cast<double>(s.n));
    Mat m = s.matrix;
    for (double& v : m.a) v *= f;
    return make_linear_map(std::move(m));
}

Subspace make_subspace(const Mat& rows) {
    Mat basis = orthonormal_rows(rows, 1e-10);
    if (basis.rows != rows.rows)
        throw InvalidInputError("make_subspace: rows are linearly dependent");
    Subspace e;
    e.n = rows.cols;
    e.basis = basis;
    return e;
}

MixingReport mixing_check(const LinearMap& t, const Subspace& e, double beta) {
    if (e.basis.rows < 1) throw InvalidInputError("mixing_check: dim E >= 1 required");
    const std::size_t n = t.n, k = e.basis.rows;
    Mat comp = orthonormal_complement(e.basis, n);
    // M[j][i] = <f_j, T e_i>
    Mat m(comp.rows, k);
    for (std::size_t i = 0; i < k; ++i) {
        Vec te = matvec(t.matrix, Vec(e.basis.row(i), e.basis.row(i) + n));
        for (std::size_t j = 0; j < comp.rows; ++j)
            m(j, i) = kernels::dot(comp.row(j), te.data(), n);
    }
    MixingReport rep;
    rep.beta_target = beta;
    rep.witness = e;
    if (comp.rows < k) {
        rep.achieved_margin = 0.0;
    } else {
        Mat g(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                double s = 0;
                for (std::size_t r = 0; r < comp.rows; ++r) s += m(r, i) * m(r, j);
                g(i, j) = s;
            }
        SymEigen eig = sym_eigen(g);
        double mn = std::numeric_limits<double>::infinity();
        for (double v : eig.values) mn = std::min(mn, v);
        rep.achieved_margin = std::sqrt(std::max(mn, 0.0));
    }
    rep.pass = rep.achieved_margin >= beta - 1e-12;
    return rep;
}

Subspace projection_mixing_witness(const LinearMap& p) {
    const std::size_t n = p.n;
    // symmetric idempotent check
    Mat pp = matmul(p.matrix, p.matrix);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (std::fabs(pp(i, j) - p.matrix(i, j)) > 1e-8)
                throw InvalidInputError("projection_mixing_witness: not idempotent");
            if (std::fabs(p.matrix(i, j) - p.matrix(j, i)) > 1e-8)
                throw InvalidInputError("projection_mixing_witness: not symmetric");
        }
    double trace = 0;
    for (std::size_t i = 0; i < n; ++i) trace += p.matrix(i, i);
    std::size_t s = static_cast<std::size_t>(std::llround(trace));
    if (s < 1 || 2 * s > n)
        throw InvalidInputError("projection_mixing_witness: rank must satisfy 1 <= s <= n/2");

    Mat range = orthonormal_rows(p.matrix, 1e-8);
    if (range.rows != s) throw NumericalFailure("projection_mixing_witness: rank mismatch");
    Mat kernel = orthonormal_complement(range, n);  // (n-s) >= s rows
    Mat w(s, n);
    double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < n; ++j)
            w(i, j) = inv_sqrt2 * (range(i, j) + kernel(i, j));
    return make_subspace(w);
}

ShiftInvarianceReport mixing_shift_invariance_test(const LinearMap& t, const Subspace& e,
                                                   const std::vector<double>& lambdas) {
    ShiftInvarianceReport rep;
    rep.base_margin = mixing_check(t, e, 0.0).achieved_margin;
    for (double lambda : lambdas) {
        Mat shifted = t.matrix;
        for (std::size_t i = 0; i < t.n; ++i) shifted(i, i) += lambda;
        double m = mixing_check(make_linear_map(shifted), e, 0.0).achieved_margin;
        rep.shifted_margins.push_back(m);
        rep.max_deviation = std::max(rep.max_deviation, std::fabs(m - rep.base_margin));
    }
    rep.pass = rep.max_deviation <= 1e-10;
    return rep;
}

MixingReport two_p_mixing_test(const LinearMap& p) {
    const std::size_t n = p.n;
    double trace = 0;
    for (std::size_t i = 0; i < n; ++i) trace += p.matrix(i, i);
    std::size_t s = static_cast<std::size_t>(std::llround(trace));
    if (s < 1 || s >= n)
        throw InvalidInputError("two_p_mixing_test: min(s, n-s) >= 1 required");

    Mat two_p = p.matrix;
    for (double& v : two_p.a) v *= 2.0;
    LinearMap t2 = make_linear_map(two_p);

    Subspace w;
    if (2 * s <= n) {
        w = projection_mixing_witness(p);
    } else {
        // case split: use I - P (rank n-s <= n/2); 2P = 2I - 2(I-P) has the
        // same margins as -2(I-P) by shift invariance
        Mat q = Mat::identity(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) q(i, j) -= p.matrix(i, j);
        w = projection_mixing_witness(make_linear_map(q));
    }
    MixingReport rep = mixing_check(t2, w, 1.0 - 1e-8);
    rep.beta_target = 1.0;
    return rep;
}

std::vector<LinearMap> greedy_net(const OperatorBallSpec& spec, double t,
                                  std::size_t sample_budget, RngSeed seed) {
    if (spec.n > 3) throw UnsupportedError("greedy_net: n <= 3 only");
    if (!(t > 0)) throw InvalidInputError("greedy_net: t > 0 required");
    std::optional<BodyMembership> mem_storage;
    const BodyMembership* mem = nullptr;
    double column_radius = 1.0;
    if (spec.kind != BallKind::v_op) {
        mem_storage.emplace(spec.body);
        mem = &*mem_storage;
        for (std::size_t j = 0; j < spec.body.generators.rows; ++j)
            column_radius = std::max(column_radius,
                                     std::sqrt(kernels::dot(spec.body.generators.row(j),
                                                            spec.body.generators.row(j),
                                                            spec.n)));
    }

    Rng rng(seed);
    std::vector<LinearMap> net;
    Mat candidate;
    for (std::size_t b = 0; b < sample_budget; ++b) {
        if (!sample_ball_member(spec, rng, mem, column_radius, &candidate)) continue;
        bool separated = true;
        for (const LinearMap& c : net) {
            if (op_metric(candidate, c.matrix) < t) {
                separated = false;
                break;
            }
        }
        if (separated) net.push_back(make_linear_map(candidate));
    }
    if (net.empty()) throw NumericalFailure("greedy_net: no ball members found within budget");
    return net;
}

double net_covering_fraction(const std::vector<LinearMap>& net, const OperatorBallSpec& spec,
                             double t, std::size_t holdout, RngSeed seed) {
    std::optional<BodyMembership> mem_storage;
    const BodyMembership* mem = nullptr;
    double column_radius = 1.0;
    if (spec.kind != BallKind::v_op) {
        mem_storage.emplace(spec.body);
        mem = &*mem_storage;
        for (std::size_t j = 0; j < spec.body.generators.rows; ++j)
            column_radius = std::max(column_radius,
                                     std::sqrt(kernels::dot(spec.body.generators.row(j),
                                                            spec.body.generators.row(j),
                                                            spec.n)));
    }
    Rng rng(seed);
    std::size_t covered = 0, found = 0;
    Mat candidate;
    std::size_t attempts = 0;
    while (found < holdout && attempts < holdout * 1000) {
        ++attempts;
        if (!sample_ball_member(spec, rng, mem, column_radius, &candidate)) continue;
        ++found;
        for (const LinearMap& c : net) {
            if (op_metric(candidate, c.matrix) <= t + 1e-12) {
                ++covered;
                break;
            }
        }
    }
    if (found == 0) throw NumericalFailure("net_covering_fraction: no holdout members found");
    return static_cast<double>(covered) / static_cast<double>(found);
}

double entropy_bound(double t, std::size_t n, double vol_b, double vol_hull, double vol_ball,
                     double vol_cross, double c0) {
    if (!(t > 0) || vol_b <= 0 || vol_hull <= 0 || vol_ball <= 0 || vol_cross <= 0)
        throw InvalidInputError("entropy_bound: positive volumes and t required");
    double nn = static_cast<double>(n);
    return std::pow(c0 / t, nn * nn) *
           std::pow(vol_b * vol_cross / (vol_ball * vol_hull), nn);
}

EstimateReport operator_ball_volume_check(const VPolytope& b, std::size_t trials, RngSeed seed) {
    if (b.n != 2) throw UnsupportedError("operator_ball_volume_check: n = 2 only");
    BodyMembership mem(b);
    double r = 0;
    for (std::size_t j = 0; j < b.generators.rows; ++j)
        r = std::max(r, std::sqrt(kernels::dot(b.generators.row(j), b.generators.row(j), 2)));
    double box_volume = std::pow(2.0 * r, 4.0);

    Rng rng(seed);
    std::uint64_t hits = 0;
    Vec c1(2), c2(2);
    for (std::size_t i = 0; i < trials; ++i) {
        c1[0] = rng.uniform(-r, r);
        c1[1] = rng.uniform(-r, r);
        c2[0] = rng.uniform(-r, r);
        c2[1] = rng.uniform(-r, r);
        if (mem.norm(c1) <= 1.0 && mem.norm(c2) <= 1.0) ++hits;
    }
    EstimateReport rep = binomial_report(hits, trials, seed, "operator_ball_volume_mc");
    rep.value *= box_volume;
    rep.ci_low *= box_volume;
    rep.ci_high *= box_volume;
    return rep;
}

VopVolumeReport vop_volume_check(std::size_t n, std::size_t trials, RngSeed seed) {
    if (n < 1 || n > 3) throw UnsupportedError("vop_volume_check: n <= 3 only");
    double nn = static_cast<double>(n);
    double box_volume = std::pow(2.0, nn * nn);
    Rng rng(seed);
    std::uint64_t hits = 0;
    Mat t(n, n);
    for (std::size_t i = 0; i < trials; ++i) {
        for (double& v : t.a) v = rng.uniform(-1.0, 1.0);
        if (spectral_norm_small(t) <= 1.0) ++hits;
    }
    VopVolumeReport rep;
    rep.estimate = binomial_report(hits, trials, seed, "vop_volume_mc");
    rep.estimate.value *= box_volume;
    rep.estimate.ci_low *= box_volume;
    rep.estimate.ci_high *= box_volume;
    rep.c2 = std::pow(rep.estimate.value, 1.0 / (nn * nn)) * std::sqrt(nn);
    return rep;
}

}  // namespace glab
