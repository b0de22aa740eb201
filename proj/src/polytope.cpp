#include "glab/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "glab/errors.hpp"
#include "glab/lowdim.hpp"
#include "glab/lp.hpp"

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

}  // namespace

Vec sphere_direction(Rng& rng, std::size_t n) {
    Vec u(n);
    double len = 0;
    do {
        for (std::size_t i = 0; i < n; ++i) u[i] = rng.gaussian();
        len = norm2(u);
    } while (len < 1e-12);
    scale(u, 1.0 / len);
    return u;
}

VPolytope make_vpolytope(Mat generators, std::string label) {
    VPolytope p;
    p.n = generators.cols;
    p.generators = std::move(generators);
    p.label = std::move(label);
    p.span_basis = orthonormal_rows(p.generators, 1e-10);
    p.full_dimensional = p.span_basis.rows == p.n;
    return p;
}

VPolytope build_basis_enriched(const SampleSet& samples) {
    if (samples.m < 1) throw InvalidInputError("build_basis_enriched: m >= 1 required");
    const std::size_t n = samples.n;
    Mat gens(n + samples.m, n);
    for (std::size_t i = 0; i < n; ++i) gens(i, i) = 1.0;
    double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t j = 0; j < samples.m; ++j)
        for (std::size_t i = 0; i < n; ++i)
            gens(n + j, i) = samples.points(j, i) * inv_sqrt_n;
    return make_vpolytope(std::move(gens), "basis_enriched");
}

VPolytope build_pure(const SampleSet& samples) {
    if (samples.m < 1) throw InvalidInputError("build_pure: m >= 1 required");
    return make_vpolytope(samples.points, "pure");
}

double minkowski_norm(const VPolytope& p, const Vec& z) {
    if (z.size() != p.n) throw InvalidInputError("minkowski_norm: dimension mismatch");
    double zn = norm2(z);
    if (zn == 0.0) return 0.0;

    // express the equality system in span coordinates; reject off-span points
    const Mat& basis = p.span_basis;
    Vec z_span(basis.rows);
    for (std::size_t i = 0; i < basis.rows; ++i)
        z_span[i] = kernels::dot(basis.row(i), z.data(), p.n);
    if (!p.full_dimensional) {
        Vec resid = z;
        for (std::size_t i = 0; i < basis.rows; ++i)
            kernels::axpy(resid.data(), -z_span[i], basis.row(i), p.n);
        if (norm2(resid) > 1e-8 * (1.0 + zn))
            throw UnreachablePointError("minkowski_norm: point outside polytope span");
    }

    const std::size_t k = p.generators.rows;
    LpProblem lp;
    lp.objective.assign(2 * k, 1.0);
    lp.eq_rows = Mat(basis.rows, 2 * k);
    lp.eq_rhs = z_span;
    for (std::size_t i = 0; i < basis.rows; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            double gij = kernels::dot(basis.row(i), p.generators.row(j), p.n);
            lp.eq_rows(i, j) = gij;
            lp.eq_rows(i, k + j) = -gij;
        }
    }
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
        throw NumericalFailure("minkowski_norm: LP did not reach optimality");
    return sol.objective_value;
}

double support_function(const VPolytope& p, const Vec& y) {
    if (y.size() != p.n) throw InvalidInputError("support_function: dimension mismatch");
    if (p.generators.rows == 0) return 0.0;
    return kernels::max_abs_dot(p.generators.a.data(), p.generators.rows, p.n, y.data());
}

HPolytope polar(const VPolytope& p) {
    if (!p.full_dimensional)
        throw InvalidInputError("polar: polytope is not full-dimensional (polar unbounded)");
    HPolytope h;
    h.n = p.n;
    h.normals = p.generators;
    h.label = p.label.empty() ? "polar" : "polar(" + p.label + ")";
    return h;
}

bool membership(const HPolytope& h, const Vec& y) { return hnorm(h, y) <= 1.0 + 1e-12; }

double hnorm(const HPolytope& h, const Vec& y) {
    if (y.size() != h.n) throw InvalidInputError("hnorm: dimension mismatch");
    if (h.normals.rows == 0) return 0.0;
    return kernels::max_abs_dot(h.normals.a.data(), h.normals.rows, h.n, y.data());
}

InradiusEstimate inradius_estimate(const VPolytope& p, std::size_t directions,
                                   std::size_t refine_steps, RngSeed seed) {
    if (!p.full_dimensional)
        throw InvalidInputError("inradius_estimate: polytope is not full-dimensional");
    InradiusEstimate out;
    for (std::size_t j = 0; j < p.generators.rows; ++j)
        out.circumradius = std::max(
            out.circumradius,
            std::sqrt(kernels::dot(p.generators.row(j), p.generators.row(j), p.n)));

    if (p.n <= 3) {
        out.inradius = exact_inradius_lowdim(symmetric_vertices(p.generators), p.n);
        out.exact = true;
        return out;
    }

    Rng rng(seed);
    Vec best_u;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < directions; ++d) {
        Vec u = sphere_direction(rng, p.n);
        double h = support_function(p, u);
        if (h < best) {
            best = h;
            best_u = u;
        }
    }
    double sigma = 0.1;
    for (std::size_t s = 0; s < refine_steps; ++s) {
        Vec u = best_u;
        for (std::size_t i = 0; i < p.n; ++i) u[i] += sigma * rng.gaussian();
        double len = norm2(u);
        if (len < 1e-12) continue;
        scale(u, 1.0 / len);
        double h = support_function(p, u);
        if (h < best) {
            best = h;
            best_u = u;
        } else {
            sigma *= 0.995;
        }
    }
    out.inradius = best;
    out.exact = false;
    return out;
}

EstimateReport zp_support_estimate(const DistributionSpec& spec, const Vec& y, double p,
                                   std::size_t trials, RngSeed seed) {
    if (p < 1.0) throw InvalidInputError("zp_support_estimate: p >= 1 required");
    if (y.size() != spec.n) throw InvalidInputError("zp_support_estimate: dimension mismatch");
    if (trials < 2) throw InvalidInputError("zp_support_estimate: trials >= 2 required");

    const std::size_t batches = std::min<std::size_t>(20, trials);
    std::vector<double> batch_sum(batches, 0.0);
    std::vector<std::size_t> batch_count(batches, 0);
    double total = 0.0;
    for (std::size_t j = 0; j < trials; ++j) {
        Vec x = draw_point(spec, seed.with_stream(seed.stream_index + j));
        double v = std::pow(std::fabs(dot(x, y)), p);
        total += v;
        batch_sum[j % batches] += v;
        batch_count[j % batches]++;
    }
    double mean_pow = total / static_cast<double>(trials);
    double var = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
        double bm = batch_sum[b] / static_cast<double>(batch_count[b]);
        var += (bm - mean_pow) * (bm - mean_pow);
    }
    var /= static_cast<double>(batches) * std::max<std::size_t>(batches - 1, 1);
    double half = 1.959963984540054 * std::sqrt(var);

    EstimateReport rep;
    rep.value = std::pow(mean_pow, 1.0 / p);
    rep.ci_low = std::pow(std::max(mean_pow - half, 0.0), 1.0 / p);
    rep.ci_high = std::pow(mean_pow + half, 1.0 / p);
    rep.trials = trials;
    rep.seed = seed;
    rep.method = "zp_support_mc";
    return rep;
}

ZpInclusionReport zp_inclusion_check(const DistributionSpec& spec, double p, double q,
                                     std::size_t directions, std::size_t trials, double c,
                                     RngSeed seed) {
    if (!(1.0 <= p && p < q)) throw InvalidInputError("zp_inclusion_check: need 1 <= p < q");
    ZpInclusionReport rep;
    rep.q_over_p_bound = c * q / p;
    rep.directions = directions;
    rep.worst_lower_ratio = std::numeric_limits<double>::infinity();
    rep.worst_upper_ratio = 0.0;
    Rng dir_rng(seed);
    for (std::size_t d = 0; d < directions; ++d) {
        Vec u = sphere_direction(dir_rng, spec.n);
        // same draws for both exponents: the empirical power-mean inequality
        // then gives h_p <= h_q exactly
        double sp = 0, sq = 0;
        RngSeed base = seed.with_stream(seed.stream_index + 1 + d * trials);
        for (std::size_t j = 0; j < trials; ++j) {
            Vec x = draw_point(spec, base.with_stream(base.stream_index + j));
            double a = std::fabs(dot(x, u));
            sp += std::pow(a, p);
            sq += std::pow(a, q);
        }
        double hp = std::pow(sp / trials, 1.0 / p);
        double hq = std::pow(sq / trials, 1.0 / q);
        double ratio = hq / hp;
        rep.worst_lower_ratio = std::min(rep.worst_lower_ratio, ratio);
        rep.worst_upper_ratio = std::max(rep.worst_upper_ratio, ratio);
        if (hq < hp * (1.0 - 1e-12)) rep.monotonicity_violations++;
        if (ratio > rep.q_over_p_bound) rep.upper_violations++;
    }
    rep.pass = rep.monotonicity_violations == 0 && rep.upper_violations == 0;
    return rep;
}

DgtReport dgt_inclusion_check(const SampleSet& samples, double c1, std::size_t directions,
                              RngSeed seed) {
    if (samples.m < samples.n) throw InvalidInputError("dgt_inclusion_check: m >= n required");
    VPolytope b = build_pure(samples);
    DgtReport rep;
    rep.q = std::log(1.0 + static_cast<double>(samples.m) / static_cast<double>(samples.n));
    rep.directions = directions;
    rep.max_passing_c1 = std::numeric_limits<double>::infinity();
    std::size_t failures = 0;
    Rng rng(seed);
    for (std::size_t d = 0; d < directions; ++d) {
        Vec u = sphere_direction(rng, samples.n);
        double hb = support_function(b, u);
        double s = 0;
        for (std::size_t j = 0; j < samples.m; ++j)
            s += std::pow(std::fabs(kernels::dot(samples.points.row(j), u.data(), samples.n)),
                          rep.q);
        double hz = std::pow(s / static_cast<double>(samples.m), 1.0 / rep.q);
        if (hz <= 0) continue;
        rep.max_passing_c1 = std::min(rep.max_passing_c1, hb / hz);
        if (hb < c1 * hz) ++failures;
    }
    rep.failure_fraction = static_cast<double>(failures) / static_cast<double>(directions);
    rep.pass = failures == 0;
    return rep;
}

namespace {

void write_matrix_csv(const Mat& m, const std::string& path, const std::string& label,
                      const std::string& kind) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot open " + path);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (j) out << ',';
            out << fmt_g17(m(i, j));
        }
        out << '\n';
    }
    nlohmann::json manifest;
    manifest["kind"] = kind;
    manifest["label"] = label;
    manifest["n"] = m.cols;
    manifest["rows"] = m.rows;
    std::ofstream side(path + ".json");
    side << manifest.dump(2) << '\n';
}

Mat read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open " + path);
    std::vector<Vec> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        Vec row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidInputError("empty matrix file " + path);
    Mat m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols) throw InvalidInputError("ragged matrix file " + path);
        for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

std::string read_label(const std::string& path) {
    std::ifstream side(path + ".json");
    if (!side) return "";
    nlohmann::json manifest = nlohmann::json::parse(side, nullptr, false);
    if (manifest.is_discarded() || !manifest.contains("label")) return "";
    return manifest["label"].get<std::string>();
}

}  // namespace

void write_vpolytope_csv(const VPolytope& p, const std::string& path) {
    write_matrix_csv(p.generators, path, p.label, "vpolytope");
}

VPolytope read_vpolytope_csv(const std::string& path) {
    return make_vpolytope(read_matrix_csv(path), read_label(path));
}

void write_hpolytope_csv(const HPolytope& h, const std::string& path) {
    write_matrix_csv(h.normals, path, h.label, "hpolytope");
}

HPolytope read_hpolytope_csv(const std::string& path) {
    HPolytope h;
    h.normals = read_matrix_csv(path);
    h.n = h.normals.cols;
    h.label = read_label(path);
    return h;
}

}  // namespace glab
