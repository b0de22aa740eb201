#include "glab/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "glab/errors.hpp"

namespace glab {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;
constexpr std::size_t kChordFailureCap = 1000;

void fill_gaussian_direction(Rng& rng, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = rng.gaussian();
}

// One hit-and-run chain; writes every post-burn-in state as a sample row.
void run_hit_and_run(const DistributionSpec& spec, std::size_t m, Rng& rng, Mat& points) {
    const std::size_t n = spec.n;
    const bool exact = spec.body_normals.rows > 0;
    if (!exact && !spec.membership)
        throw InvalidInputError("sample: hit_and_run_body requires normals or a membership oracle");
    if (!exact && !(spec.membership_radius > 0))
        throw InvalidInputError("sample: membership oracle requires a positive bounding radius");

    if (exact && orthonormal_rows(spec.body_normals).rows < n)
        throw NumericalFailure("sample: hit-and-run body is unbounded (normals do not span)");

    Vec x(n, 0.0);
    if (!exact && !spec.membership(x))
        throw NumericalFailure("sample: hit-and-run start point not in body (empty oracle?)");

    std::size_t burn = spec.burn_in ? spec.burn_in : 10 * n * n;
    std::size_t failures = 0;
    Vec d(n);
    std::size_t produced = 0;
    for (std::size_t step = 0; produced < m; ++step) {
        fill_gaussian_direction(rng, d.data(), n);
        double dn = std::sqrt(kernels::dot(d.data(), d.data(), n));
        if (dn < 1e-12) continue;
        for (double& v : d) v /= dn;

        double lo, hi;
        bool ok = true;
        if (exact) {
            lo = -std::numeric_limits<double>::infinity();
            hi = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < spec.body_normals.rows; ++j) {
                double ux = kernels::dot(spec.body_normals.row(j), x.data(), n);
                double ud = kernels::dot(spec.body_normals.row(j), d.data(), n);
                if (std::fabs(ud) < 1e-14) {
                    if (std::fabs(ux) > 1.0 + 1e-12) ok = false;
                    continue;
                }
                double t1 = (1.0 - ux) / ud;
                double t2 = (-1.0 - ux) / ud;
                if (t1 > t2) std::swap(t1, t2);
                if (t1 > lo) lo = t1;
                if (t2 < hi) hi = t2;
            }
            if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) ok = false;
        } else {
            // bisect the chord endpoints against the membership oracle
            auto endpoint = [&](double sign) {
                double inside = 0.0, outside = spec.membership_radius * 2.0;
                Vec probe(n);
                for (int it = 0; it < 60; ++it) {
                    double mid = 0.5 * (inside + outside);
                    for (std::size_t i = 0; i < n; ++i) probe[i] = x[i] + sign * mid * d[i];
                    if (spec.membership(probe))
                        inside = mid;
                    else
                        outside = mid;
                }
                return sign * inside;
            };
            hi = endpoint(+1.0);
            lo = endpoint(-1.0);
            if (hi - lo < 1e-14) ok = false;
        }
        if (!ok) {
            if (++failures > kChordFailureCap)
                throw NumericalFailure("sample: hit-and-run chord failure cap exceeded "
                                       "(unbounded or empty body)");
            continue;
        }
        failures = 0;
        double t = rng.uniform(lo, hi);
        kernels::axpy(x.data(), t, d.data(), n);

        if (step >= burn) {
            for (std::size_t i = 0; i < n; ++i) points(produced, i) = x[i];
            ++produced;
        }
    }
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::gaussian: return "gaussian";
        case Family::cube_uniform: return "cube_uniform";
        case Family::product_exponential: return "product_exponential";
        case Family::ball_uniform: return "ball_uniform";
        case Family::hit_and_run_body: return "hit_and_run_body";
    }
    throw InvalidInputError("family_name: unknown family");
}

Family family_from_name(const std::string& name) {
    if (name == "gaussian") return Family::gaussian;
    if (name == "cube_uniform") return Family::cube_uniform;
    if (name == "product_exponential") return Family::product_exponential;
    if (name == "ball_uniform") return Family::ball_uniform;
    if (name == "hit_and_run_body") return Family::hit_and_run_body;
    throw InvalidInputError("unknown distribution family: " + name);
}

SampleSet sample(const DistributionSpec& spec, std::size_t m, RngSeed seed) {
    if (m < 1 || spec.n < 1) throw InvalidInputError("sample: m >= 1 and n >= 1 required");
    const std::size_t n = spec.n;
    SampleSet out;
    out.n = n;
    out.m = m;
    out.points = Mat(m, n);
    out.spec = spec;
    out.seed = seed;

    Rng rng(seed);
    switch (spec.family) {
        case Family::gaussian:
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) out.points(i, j) = rng.gaussian();
            break;
        case Family::cube_uniform:
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    out.points(i, j) = rng.uniform(-kSqrt3, kSqrt3);
            break;
        case Family::product_exponential:
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) out.points(i, j) = rng.laplace_unit();
            break;
        case Family::ball_uniform: {
            double radius = std::sqrt(static_cast<double>(n) + 2.0);
            Vec g(n);
            for (std::size_t i = 0; i < m; ++i) {
                fill_gaussian_direction(rng, g.data(), n);
                double gn = std::sqrt(kernels::dot(g.data(), g.data(), n));
                while (gn < 1e-12) {
                    fill_gaussian_direction(rng, g.data(), n);
                    gn = std::sqrt(kernels::dot(g.data(), g.data(), n));
                }
                double r = radius * std::pow(rng.uniform_pos(), 1.0 / static_cast<double>(n));
                for (std::size_t j = 0; j < n; ++j) out.points(i, j) = r * g[j] / gn;
            }
            break;
        }
        case Family::hit_and_run_body:
            run_hit_and_run(spec, m, rng, out.points);
            break;
    }
    return out;
}

Vec draw_point(const DistributionSpec& spec, RngSeed seed) {
    SampleSet s = sample(spec, 1, seed);
    return Vec(s.points.row(0), s.points.row(0) + s.n);
}

IsotropyReport isotropy_report(const SampleSet& samples) {
    const std::size_t n = samples.n, m = samples.m;
    Vec mean(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        kernels::axpy(mean.data(), 1.0 / static_cast<double>(m), samples.points.row(i), n);
    Mat cov(n, n);
    Vec centered(n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) centered[j] = samples.points(i, j) - mean[j];
        for (std::size_t a = 0; a < n; ++a)
            kernels::axpy(cov.row(a), centered[a] / static_cast<double>(m), centered.data(), n);
    }
    for (std::size_t i = 0; i < n; ++i) cov(i, i) -= 1.0;
    SymEigen eig = sym_eigen(cov);
    double dist = 0.0;
    for (double v : eig.values) dist = std::max(dist, std::fabs(v));

    IsotropyReport rep;
    rep.empirical_mean_norm = norm2(mean);
    rep.covariance_operator_distance = dist;
    rep.isotropic_constant_estimate =
        samples.spec.family == Family::hit_and_run_body ? 0.0
                                                        : isotropic_constant(samples.spec);
    return rep;
}

IsotropizeResult isotropize(const SampleSet& raw) {
    const std::size_t n = raw.n, m = raw.m;
    Vec mean(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        kernels::axpy(mean.data(), 1.0 / static_cast<double>(m), raw.points.row(i), n);
    Mat cov(n, n);
    Vec centered(n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) centered[j] = raw.points(i, j) - mean[j];
        for (std::size_t a = 0; a < n; ++a)
            kernels::axpy(cov.row(a), centered[a] / static_cast<double>(m), centered.data(), n);
    }
    SymEigen eig = sym_eigen(cov);
    for (double v : eig.values)
        if (v <= 1e-10)
            throw NumericalFailure("isotropize: empirical covariance is rank deficient");

    // W = C^{-1/2} = V^T diag(1/sqrt(lambda)) V with eigenvector rows V
    Mat w(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        double s = 1.0 / std::sqrt(eig.values[k]);
        for (std::size_t i = 0; i < n; ++i)
            kernels::axpy(w.row(i), s * eig.vectors(k, i), eig.vectors.row(k), n);
    }

    IsotropizeResult out;
    out.transform = w;
    out.shift = mean;
    out.set = raw;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) centered[j] = raw.points(i, j) - mean[j];
        Vec y = matvec(w, centered);
        for (std::size_t j = 0; j < n; ++j) out.set.points(i, j) = y[j];
    }
    return out;
}

double unit_ball_volume(std::size_t n) {
    double half_n = 0.5 * static_cast<double>(n);
    return std::exp(half_n * std::log(M_PI) - std::lgamma(half_n + 1.0));
}

double isotropic_constant(const DistributionSpec& spec) {
    switch (spec.family) {
        case Family::gaussian:
            return 1.0 / std::sqrt(2.0 * M_PI);
        case Family::cube_uniform:
            return 1.0 / (2.0 * kSqrt3);
        case Family::product_exponential:
            return 1.0 / std::sqrt(2.0);
        case Family::ball_uniform: {
            // density 1/(omega_n R^n), R = sqrt(n+2)
            double radius = std::sqrt(static_cast<double>(spec.n) + 2.0);
            return 1.0 / (radius * std::pow(unit_ball_volume(spec.n),
                                            1.0 / static_cast<double>(spec.n)));
        }
        case Family::hit_and_run_body:
            throw UnsupportedError("isotropic_constant: no density bound for hit_and_run_body");
    }
    throw InvalidInputError("isotropic_constant: unknown family");
}

EstimateReport radius_band_check(const SampleSet& samples, double eps0, double b) {
    if (!(eps0 < b) || eps0 < 0.0)
        throw InvalidInputError("radius_band_check: require 0 <= eps0 < b");
    double sqrt_n = std::sqrt(static_cast<double>(samples.n));
    std::uint64_t violations = 0;
    for (std::size_t i = 0; i < samples.m; ++i) {
        double r = std::sqrt(
            kernels::dot(samples.points.row(i), samples.points.row(i), samples.n));
        if (r < eps0 * sqrt_n || r > b * sqrt_n) ++violations;
    }
    return binomial_report(violations, samples.m, samples.seed, "radius_band");
}

std::vector<TailCheckReport> paouris_tail_check(const DistributionSpec& spec,
                                               const std::vector<double>& t_values, double c,
                                               std::size_t trials, RngSeed seed) {
    if (trials < 1) throw InvalidInputError("paouris_tail_check: trials >= 1");
    double sqrt_n = std::sqrt(static_cast<double>(spec.n));
    std::vector<TailCheckReport> out;
    out.reserve(t_values.size());
    std::uint64_t stream_block = 0;
    for (double t : t_values) {
        double threshold = c * t * sqrt_n;
        std::uint64_t hits = 0;
        for (std::size_t j = 0; j < trials; ++j) {
            Vec x = draw_point(spec, seed.with_stream(seed.stream_index + stream_block + j));
            double r = std::sqrt(kernels::dot(x.data(), x.data(), x.size()));
            if (r >= threshold) ++hits;
        }
        TailCheckReport rep;
        rep.t = t;
        rep.estimate = binomial_report(hits, trials, seed, "paouris_tail");
        rep.bound = std::exp(-t * sqrt_n);
        rep.pass = rep.estimate.ci_high <= rep.bound;
        out.push_back(rep);
        stream_block += trials;
    }
    return out;
}

SmallBallReport small_ball_check(const DistributionSpec& spec, double eps, const Vec& y, double c0,
                                 std::size_t trials, RngSeed seed) {
    if (!(eps > 0.0) || eps > 1.0)
        throw InvalidInputError("small_ball_check: require 0 < eps <= 1");
    if (y.size() != spec.n) throw InvalidInputError("small_ball_check: center dimension mismatch");
    double threshold = eps * static_cast<double>(spec.n);
    std::uint64_t hits = 0;
    for (std::size_t j = 0; j < trials; ++j) {
        Vec x = draw_point(spec, seed.with_stream(seed.stream_index + j));
        double d2 = 0.0;
        for (std::size_t i = 0; i < spec.n; ++i) {
            double diff = x[i] - y[i];
            d2 += diff * diff;
        }
        if (d2 <= threshold) ++hits;
    }
    SmallBallReport rep;
    rep.estimate = binomial_report(hits, trials, seed, "small_ball");
    rep.bound = std::pow(eps, c0 * static_cast<double>(spec.n));
    rep.pass = rep.estimate.ci_high <= rep.bound;
    return rep;
}

void write_samples_csv(const SampleSet& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("write_samples_csv: cannot open " + path);
    out << "n,m,family,seed\n";
    out << samples.n << ',' << samples.m << ',' << family_name(samples.spec.family) << ','
        << samples.seed.seed << '\n';
    for (std::size_t i = 0; i < samples.m; ++i) {
        for (std::size_t j = 0; j < samples.n; ++j) {
            if (j) out << ',';
            out << fmt_g17(samples.points(i, j));
        }
        out << '\n';
    }
}

SampleSet read_samples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("read_samples_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "n,m,family,seed")
        throw InvalidInputError("read_samples_csv: bad header in " + path);
    if (!std::getline(in, line)) throw InvalidInputError("read_samples_csv: missing meta row");
    std::stringstream meta(line);
    std::string ns, ms, fam, seed_s;
    std::getline(meta, ns, ',');
    std::getline(meta, ms, ',');
    std::getline(meta, fam, ',');
    std::getline(meta, seed_s, ',');

    SampleSet s;
    s.n = std::stoull(ns);
    s.m = std::stoull(ms);
    s.spec.family = family_from_name(fam);
    s.spec.n = s.n;
    s.seed.seed = std::stoull(seed_s);
    s.points = Mat(s.m, s.n);
    for (std::size_t i = 0; i < s.m; ++i) {
        if (!std::getline(in, line))
            throw InvalidInputError("read_samples_csv: truncated file " + path);
        std::stringstream row(line);
        std::string cell;
        for (std::size_t j = 0; j < s.n; ++j) {
            if (!std::getline(row, cell, ','))
                throw InvalidInputError("read_samples_csv: short row in " + path);
            s.points(i, j) = std::stod(cell);
        }
    }
    return s;
}

}  // namespace glab
