#ifndef GLAB_SAMPLING_HPP
#define GLAB_SAMPLING_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "glab/linalg.hpp"
#include "glab/report.hpp"
#include "glab/rng.hpp"

namespace glab {

struct VPolytope;  // polytope.hpp

enum class Family {
    gaussian,
    cube_uniform,
    product_exponential,
    ball_uniform,
    hit_and_run_body,
};

const char* family_name(Family f);
Family family_from_name(const std::string& name);

/// Names an isotropic log-concave law. Built-in families are exactly
/// isotropic by construction: cube side 2*sqrt(3), two-sided exponential
/// scaled by 1/sqrt(2) per coordinate, ball of radius sqrt(n+2).
/// hit_and_run_body is the only approximate sampler (MCMC; burn-in applies).
struct DistributionSpec {
    Family family = Family::gaussian;
    std::size_t n = 1;

    // hit_and_run_body parameters. When body_normals is non-empty the body is
    // {x : |<u_j,x>| <= 1} and chords are computed exactly; otherwise
    // `membership` is probed by bisection out to membership_radius.
    Mat body_normals;
    std::function<bool(const Vec&)> membership;
    double membership_radius = 0.0;
    std::size_t burn_in = 0;  // 0 means the default 10*n^2 steps

    static DistributionSpec make(Family f, std::size_t n) {
        DistributionSpec s;
        s.family = f;
        s.n = n;
        return s;
    }
};

struct SampleSet {
    std::size_t n = 0;
    std::size_t m = 0;
    Mat points;  // m x n, rows are x_1..x_m
    DistributionSpec spec;
    RngSeed seed;
};

struct IsotropyReport {
    double empirical_mean_norm = 0.0;
    double covariance_operator_distance = 0.0;  // spectral distance from I
    double isotropic_constant_estimate = 0.0;
};

struct IsotropizeResult {
    SampleSet set;
    Mat transform;  // whitening map W: output row = W * (input row - shift)
    Vec shift;      // empirical mean of the input
};

struct TailCheckReport {
    double t = 0.0;
    EstimateReport estimate;
    double bound = 0.0;
    bool pass = false;
};

struct SmallBallReport {
    EstimateReport estimate;
    double bound = 0.0;
    bool pass = false;
};

struct MeasureVolumeReport {
    EstimateReport estimate;  // empirical mu(alpha*K)
    double bound = 0.0;       // ||f||_inf * alpha^n * vol(K)
    bool pass = false;
};

/// Deterministic given (spec, m, seed), independent of parallelism.
SampleSet sample(const DistributionSpec& spec, std::size_t m, RngSeed seed);

/// One draw from the stream (seed.seed, seed.stream_index); equals the single
/// row of sample(spec, 1, seed). Used for per-trial parallel determinism.
Vec draw_point(const DistributionSpec& spec, RngSeed seed);

IsotropyReport isotropy_report(const SampleSet& samples);

/// Whitens: output rows y_i = W (x_i - mean) have empirical mean 0 and
/// empirical covariance I. Throws on singular covariance
/// (smallest eigenvalue <= 1e-10).
IsotropizeResult isotropize(const SampleSet& raw);

/// ||f||_inf^{1/n} for the isotropic density of a built-in family.
double isotropic_constant(const DistributionSpec& spec);

/// Fraction of rows with |x_i| outside [eps0*sqrt(n), b*sqrt(n)].
EstimateReport radius_band_check(const SampleSet& samples, double eps0, double b);

/// Per t: empirical P(|x| >= c*t*sqrt(n)) against the bound exp(-t*sqrt(n)).
std::vector<TailCheckReport> paouris_tail_check(const DistributionSpec& spec,
                                               const std::vector<double>& t_values, double c,
                                               std::size_t trials, RngSeed seed);

/// Empirical P(|x - y|^2 <= eps*n) against eps^{c0*n}.
SmallBallReport small_ball_check(const DistributionSpec& spec, double eps, const Vec& y, double c0,
                                 std::size_t trials, RngSeed seed);

/// Empirical mu(alpha*K) against ||f||_inf * alpha^n * vol(K).
/// Defined in estimators.cpp (needs the volume estimator).
MeasureVolumeReport measure_vs_volume_check(const DistributionSpec& spec, const VPolytope& K,
                                            double alpha, std::size_t trials, RngSeed seed,
                                            double tolerance = 0.05);

/// CSV persistence: header "n,m,family,seed", then m rows of n floats.
void write_samples_csv(const SampleSet& samples, const std::string& path);
SampleSet read_samples_csv(const std::string& path);

/// Volume of the Euclidean unit ball in dimension n (closed-form Gamma).
double unit_ball_volume(std::size_t n);

}  // namespace glab

#endif
