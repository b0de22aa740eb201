#include "glab/bm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <utility>

#include "glab/errors.hpp"
#include "glab/kernels.hpp"
#include "glab/lowdim.hpp"

namespace glab {

namespace {

Mat plus_minus_vertices(const Mat& generators) {
    Mat out(2 * generators.rows, generators.cols);
    for (std::size_t i = 0; i < generators.rows; ++i)
        for (std::size_t j = 0; j < generators.cols; ++j) {
            out(2 * i, j) = generators(i, j);
            out(2 * i + 1, j) = -generators(i, j);
        }
    return out;
}

/// Norm evaluator with the exact facet fast path at n <= 3.
class BodyNorm {
  public:
    explicit BodyNorm(const VPolytope& p) : body_(&p) {
        if (p.n <= 3 && p.full_dimensional)
            facets_ = facet_normals_lowdim(plus_minus_vertices(p.generators), p.n);
    }

    double operator()(const double* z) const {
        if (facets_.rows > 0)
            return kernels::max_abs_dot(facets_.a.data(), facets_.rows, body_->n, z);
        Vec v(z, z + body_->n);
        return minkowski_norm(*body_, v);
    }

    const VPolytope& body() const { return *body_; }

  private:
    const VPolytope* body_;
    Mat facets_;
};

/// ||T : X -> Y|| = max over generators g of X of ||T g||_Y.
double op_norm_mat(const Mat& t, const VPolytope& x, const BodyNorm& ny) {
    std::size_t n = x.n;
    Vec z(n);
    double best = 0.0;
    for (std::size_t i = 0; i < x.generators.rows; ++i) {
        for (std::size_t r = 0; r < n; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) s += t(r, c) * x.generators(i, c);
            z[r] = s;
        }
        best = std::max(best, ny(z.data()));
    }
    return best;
}

double circumradius(const VPolytope& p) {
    double best = 0.0;
    for (std::size_t i = 0; i < p.generators.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < p.n; ++j) s += p.generators(i, j) * p.generators(i, j);
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

Mat identity_mat(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

BmEstimate bm_upper_search(const VPolytope& x, const VPolytope& y, std::size_t restarts,
                           std::size_t steps, RngSeed seed) {
    if (x.n != y.n) throw InvalidInputError("bm_upper_search: dimension mismatch");
    if (!x.full_dimensional || !y.full_dimensional)
        throw InvalidInputError("bm_upper_search: full-dimensional bodies required");
    std::size_t n = x.n;
    BodyNorm nx(x), ny(y);

    auto product = [&](const Mat& t) -> double {
        Mat ti = inverse(t);
        return op_norm_mat(t, x, ny) * op_norm_mat(ti, y, nx);
    };
    auto normalize_det = [&](Mat& t) -> bool {
        double d = std::fabs(det_lu(t));
        if (d < 1e-10) return false;
        double s = std::pow(d, -1.0 / static_cast<double>(n));
        for (auto& v : t.a) v *= s;
        return true;
    };

    Mat best_t = identity_mat(n);
    double best = product(best_t);

    for (std::size_t r = 0; r < restarts; ++r) {
        Rng rng(seed.with_stream(seed.stream_index + r));
        Mat t = identity_mat(n);
        if (r > 0) {
            for (auto& v : t.a) v = rng.gaussian();
            if (!normalize_det(t)) continue;
        }
        double cur = product(t);
        double sigma = 0.3;
        for (std::size_t s = 0; s < steps; ++s) {
            // multiplicative perturbation (I + sigma E) T
            Mat prop(n, n);
            Mat e(n, n);
            for (auto& v : e.a) v = sigma * rng.gaussian();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    double acc = t(i, j);
                    for (std::size_t l = 0; l < n; ++l) acc += e(i, l) * t(l, j);
                    prop(i, j) = acc;
                }
            if (!normalize_det(prop)) {
                sigma = std::max(sigma * 0.95, 1e-4);
                continue;
            }
            double val = product(prop);
            if (val < cur) {
                cur = val;
                t = std::move(prop);
                sigma = std::min(sigma * 1.1, 0.5);
            } else {
                sigma = std::max(sigma * 0.95, 1e-4);
            }
        }
        if (cur < best) {
            best = cur;
            best_t = t;
        }
    }

    BmEstimate est;
    est.upper = std::max(best, 1.0);
    est.upper_witness = make_linear_map(best_t);
    return est;
}

namespace {

struct NetBox {
    double alo, ahi, blo, bhi, llo, lhi;  // alpha, beta, ln s
    int refl;
    double bound;
};

struct BoxCmp {
    bool operator()(const NetBox& a, const NetBox& b) const { return a.bound > b.bound; }
};

void rot_sigma_rot(double alpha, double s, double beta, int refl, double m[4]) {
    double ca = std::cos(alpha), sa = std::sin(alpha);
    double cb = std::cos(beta), sb = std::sin(beta);
    // R(alpha) * diag(s, 1/s) * R(beta), optionally * diag(1, -1)
    double r00 = s * ca * cb - (1.0 / s) * sa * sb;
    double r01 = -s * ca * sb - (1.0 / s) * sa * cb;
    double r10 = s * sa * cb + (1.0 / s) * ca * sb;
    double r11 = -s * sa * sb + (1.0 / s) * ca * cb;
    m[0] = r00;
    m[1] = refl ? -r01 : r01;
    m[2] = r10;
    m[3] = refl ? -r11 : r11;
}

}  // namespace

BmEstimate bm_lower_certified(const VPolytope& x, const VPolytope& y, double net_resolution,
                              RngSeed seed) {
    if (x.n != 2 || y.n != 2) throw UnsupportedError("bm_lower_certified: n = 2 only");
    if (net_resolution <= 0) throw InvalidInputError("bm_lower_certified: resolution > 0");
    BodyNorm nx(x), ny(y);

    double rx = exact_inradius_lowdim(plus_minus_vertices(x.generators), 2);
    double ry = exact_inradius_lowdim(plus_minus_vertices(y.generators), 2);
    double rxc = circumradius(x), ryc = circumradius(y);
    double fac_xy = rxc / ry;  // ||Delta T : X -> Y|| <= fac_xy * ||Delta T||_op
    double fac_yx = ryc / rx;

    BmEstimate warm = bm_upper_search(x, y, 4, 100, seed);
    double upper = warm.upper;
    double kappa = (rxc * ryc) / (rx * ry);
    double smax = std::sqrt(std::max(upper * kappa, 1.0 + 1e-9));
    double lmax = std::log(smax);

    auto product_at = [&](double a, double ls, double b, int refl, double* nxy,
                          double* nyx) -> double {
        double m[4];
        rot_sigma_rot(a, std::exp(ls), b, refl, m);
        double det = m[0] * m[3] - m[1] * m[2];
        double inv[4] = {m[3] / det, -m[1] / det, -m[2] / det, m[0] / det};
        Mat tm(2, 2), tim(2, 2);
        tm.a = {m[0], m[1], m[2], m[3]};
        tim.a = {inv[0], inv[1], inv[2], inv[3]};
        *nxy = op_norm_mat(tm, x, ny);
        *nyx = op_norm_mat(tim, y, nx);
        return *nxy * *nyx;
    };

    double best_eval = upper;
    auto eval_box = [&](NetBox& box) {
        double ac = 0.5 * (box.alo + box.ahi);
        double bc = 0.5 * (box.blo + box.bhi);
        double lc = 0.5 * (box.llo + box.lhi);
        double nxy = 0, nyx = 0;
        double p = product_at(ac, lc, bc, box.refl, &nxy, &nyx);
        best_eval = std::min(best_eval, p);
        double shi = std::exp(box.lhi);
        double dop = shi * (0.5 * (box.ahi - box.alo) + 0.5 * (box.bhi - box.blo) +
                            0.5 * (box.lhi - box.llo));
        double f1 = std::max(nxy - dop * fac_xy, 0.0);
        double f2 = std::max(nyx - dop * fac_yx, 0.0);
        box.bound = std::max(f1 * f2, 1.0);
    };

    std::priority_queue<NetBox, std::vector<NetBox>, BoxCmp> pq;
    for (int refl = 0; refl < 2; ++refl) {
        NetBox root{0.0, M_PI, 0.0, M_PI, 0.0, lmax, refl, 1.0};
        eval_box(root);
        pq.push(root);
    }

    const double t_floor = net_resolution;
    const std::size_t eval_cap = 2000000;
    std::size_t evals = 2;
    double finalized = std::numeric_limits<double>::infinity();
    double lower = 1.0;
    bool coarse = false;

    while (!pq.empty()) {
        NetBox box = pq.top();
        if (box.bound >= best_eval - 1e-12) {
            // every remaining box is bounded at least this high; done
            lower = std::min(finalized, box.bound);
            break;
        }
        pq.pop();
        double shi = std::exp(box.lhi);
        double dop = shi * (0.5 * (box.ahi - box.alo) + 0.5 * (box.bhi - box.blo) +
                            0.5 * (box.lhi - box.llo));
        if (dop <= t_floor || evals >= eval_cap) {
            if (dop > t_floor) coarse = true;
            finalized = std::min(finalized, box.bound);
            if (pq.empty()) lower = finalized;
            continue;
        }
        // split along the widest slack contributor
        double wa = box.ahi - box.alo, wb = box.bhi - box.blo, wl = box.lhi - box.llo;
        NetBox c1 = box, c2 = box;
        if (wa >= wb && wa >= wl) {
            double mid = 0.5 * (box.alo + box.ahi);
            c1.ahi = mid;
            c2.alo = mid;
        } else if (wb >= wl) {
            double mid = 0.5 * (box.blo + box.bhi);
            c1.bhi = mid;
            c2.blo = mid;
        } else {
            double mid = 0.5 * (box.llo + box.lhi);
            c1.lhi = mid;
            c2.llo = mid;
        }
        eval_box(c1);
        eval_box(c2);
        evals += 2;
        pq.push(c1);
        pq.push(c2);
    }
    if (!pq.empty()) lower = std::min(lower, std::min(finalized, pq.top().bound));
    else lower = std::min(lower, finalized);
    if (!std::isfinite(lower)) lower = 1.0;

    BmEstimate est;
    est.upper = upper;
    est.upper_witness = warm.upper_witness;
    est.lower = std::max(lower, 1.0);
    std::ostringstream method;
    method << "sl2_branch_and_bound t=" << net_resolution << " evals=" << evals
           << " slack_xy=" << t_floor * fac_xy << " slack_yx=" << t_floor * fac_yx;
    if (coarse || est.lower <= 1.0 + 1e-12) {
        est.lower = std::max(est.lower, 1.0);
        if (est.lower <= 1.0 + 1e-12) method << " (warning: net too coarse)";
    }
    est.lower_method = method.str();
    return est;
}

namespace {

VPolytope build_model(GluskinConfig::Model model, const SampleSet& set) {
    return model == GluskinConfig::Model::basis_enriched ? build_basis_enriched(set)
                                                         : build_pure(set);
}

}  // namespace

GluskinReport gluskin_pair_experiment(const GluskinConfig& config) {
    if (config.model == GluskinConfig::Model::pure &&
        static_cast<double>(config.m) < config.c0_min_points * static_cast<double>(config.n))
        throw InvalidInputError("gluskin_pair_experiment: pure model needs m >= c0 * n");
    DistributionSpec spec = config.spec;
    spec.n = config.n;

    GluskinReport rep;
    double logfac = std::log(1.0 + static_cast<double>(config.m) / static_cast<double>(config.n)) /
                    static_cast<double>(config.n);
    std::vector<double> lowers, uppers, normals;
    for (std::size_t t = 0; t < config.trials; ++t) {
        SampleSet s1 = sample(spec, config.m, config.seed.with_stream(2 * t + 1));
        SampleSet s2 = config.force_identical
                           ? s1
                           : sample(spec, config.m, config.seed.with_stream(2 * t + 2));
        GluskinTrial trial;
        VPolytope bx, by;
        try {
            bx = build_model(config.model, s1);
            by = build_model(config.model, s2);
        } catch (const InvalidInputError&) {
            trial.discarded = true;
        }
        if (!trial.discarded && (!bx.full_dimensional || !by.full_dimensional))
            trial.discarded = true;
        if (trial.discarded) {
            ++rep.discarded;
            rep.trials.push_back(trial);
            continue;
        }
        RngSeed sub = config.seed.with_stream(1000000 + t);
        if (config.n == 2 && config.certified_lower) {
            BmEstimate est = bm_lower_certified(bx, by, config.net_resolution, sub);
            trial.lower = est.lower;
            trial.upper = est.upper;
        } else {
            BmEstimate est = bm_upper_search(bx, by, config.restarts, config.steps, sub);
            trial.lower = 1.0;
            trial.upper = est.upper;
        }
        trial.normalized = trial.upper * logfac;
        lowers.push_back(trial.lower);
        uppers.push_back(trial.upper);
        normals.push_back(trial.normalized);
        rep.trials.push_back(trial);
    }
    rep.median_lower = median_of(lowers);
    rep.median_upper = median_of(uppers);
    rep.median_normalized = median_of(normals);
    return rep;
}

SkReport sk_criterion_scan(const GluskinConfig& config,
                           const std::vector<LinearMap>& operator_samples) {
    DistributionSpec spec = config.spec;
    spec.n = config.n;
    SampleSet s1 = sample(spec, config.m, config.seed.with_stream(1));
    SampleSet s2 = sample(spec, config.m, config.seed.with_stream(2));
    VPolytope bx = build_model(config.model, s1);
    VPolytope by = build_model(config.model, s2);
    BodyNorm ny(by);

    std::size_t k = config.k > 0 ? config.k : config.n / 2;
    if (k < 1 || k > config.n) throw InvalidInputError("sk_criterion_scan: bad k");

    SkReport rep;
    rep.gamma = config.gamma;
    rep.threshold = config.gamma * std::sqrt(static_cast<double>(config.n)) / 2.0;
    rep.operators = operator_samples.size();
    for (const LinearMap& t : operator_samples) {
        double sk = t.singular_values[k - 1];
        if (sk < 1e-12) throw InvalidInputError("sk_criterion_scan: s_k(T) ~ 0");
        Mat scaled = t.matrix;
        for (auto& v : scaled.a) v /= sk;
        if (op_norm_mat(scaled, bx, ny) < rep.threshold) ++rep.violations;
    }
    rep.fraction = rep.operators == 0
                       ? 0.0
                       : static_cast<double>(rep.violations) / static_cast<double>(rep.operators);
    return rep;
}

BasisConstantReport projection_norm_scan(const VPolytope& b, std::size_t rank_lo,
                                         std::size_t rank_hi, std::size_t trials, RngSeed seed) {
    std::size_t n = b.n;
    if (rank_lo < 1 || rank_hi > n - 1 || rank_lo > rank_hi)
        throw InvalidInputError("projection_norm_scan: ranks must lie in [1, n-1]");
    BodyNorm nb(b);

    BasisConstantReport rep;
    rep.trials = trials;
    rep.min_projection_norm_found = std::numeric_limits<double>::infinity();
    Vec z(n);
    std::vector<std::pair<double, std::size_t>> order(b.generators.rows);

    for (std::size_t tr = 0; tr < trials; ++tr) {
        Rng rng(seed.with_stream(seed.stream_index + tr));
        std::size_t k = rank_lo + rng.below(rank_hi - rank_lo + 1);
        rep.ranks_scanned.push_back(k);
        Mat p(n, n);
        if (tr % 3 == 2) {
            // coordinate-subset projection (random k coordinates)
            std::vector<std::size_t> idx(n);
            for (std::size_t i = 0; i < n; ++i) idx[i] = i;
            for (std::size_t i = n; i-- > 1;) std::swap(idx[i], idx[rng.below(i + 1)]);
            for (std::size_t i = 0; i < k; ++i) p(idx[i], idx[i]) = 1.0;
        } else if (tr % 3 == 0) {
            // orthogonal projection onto a random k-subspace
            Mat g(k, n);
            for (auto& v : g.a) v = rng.gaussian();
            Mat v = orthonormal_rows(g);
            if (v.rows < k) continue;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    double acc = 0.0;
                    for (std::size_t l = 0; l < k; ++l) acc += v(l, i) * v(l, j);
                    p(i, j) = acc;
                }
        } else {
            // oblique projection U (W U)^{-1} W with random range and kernel
            Mat u(n, k), w(k, n);
            for (auto& vv : u.a) vv = rng.gaussian();
            for (auto& vv : w.a) vv = rng.gaussian();
            Mat wu(k, k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) {
                    double acc = 0.0;
                    for (std::size_t l = 0; l < n; ++l) acc += w(i, l) * u(l, j);
                    wu(i, j) = acc;
                }
            Mat wui;
            try {
                wui = inverse(wu);
            } catch (const std::runtime_error&) {
                continue;
            }
            Mat uw(n, k);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < k; ++j) {
                    double acc = 0.0;
                    for (std::size_t l = 0; l < k; ++l) acc += u(i, l) * wui(l, j);
                    uw(i, j) = acc;
                }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    double acc = 0.0;
                    for (std::size_t l = 0; l < k; ++l) acc += uw(i, l) * w(l, j);
                    p(i, j) = acc;
                }
        }

        // evaluate ||P|| generator by generator, largest Euclidean image
        // first, aborting as soon as the incumbent minimum is exceeded
        for (std::size_t i = 0; i < b.generators.rows; ++i) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                double acc = 0.0;
                for (std::size_t c = 0; c < n; ++c) acc += p(r, c) * b.generators(i, c);
                s += acc * acc;
            }
            order[i] = {s, i};
        }
        std::sort(order.begin(), order.end(),
                  [](const auto& a, const auto& bb) { return a.first > bb.first; });
        double cur = 0.0;
        bool complete = true;
        for (const auto& [s2, idx] : order) {
            for (std::size_t r = 0; r < n; ++r) {
                double acc = 0.0;
                for (std::size_t c = 0; c < n; ++c) acc += p(r, c) * b.generators(idx, c);
                z[r] = acc;
            }
            cur = std::max(cur, nb(z.data()));
            if (cur >= rep.min_projection_norm_found) {
                complete = false;
                break;
            }
        }
        if (complete && cur < rep.min_projection_norm_found)
            rep.min_projection_norm_found = cur;
    }
    return rep;
}

MixingScanReport mixing_norm_scan(const VPolytope& b, const std::vector<LinearMap>& family,
                                  const Subspace& e, double gamma) {
    if (family.empty()) throw InvalidInputError("mixing_norm_scan: empty family");
    BodyNorm nb(b);
    MixingScanReport rep;
    rep.gamma_sqrt_n = gamma * std::sqrt(static_cast<double>(b.n));
    rep.min_norm = std::numeric_limits<double>::infinity();
    for (const LinearMap& t : family) {
        double nrm = op_norm_mat(t.matrix, b, nb);
        rep.norms.push_back(nrm);
        rep.margins.push_back(mixing_check(t, e, 0.0).achieved_margin);
        rep.min_norm = std::min(rep.min_norm, nrm);
    }
    return rep;
}

}  // namespace glab
