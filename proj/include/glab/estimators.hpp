#ifndef GLAB_ESTIMATORS_HPP
#define GLAB_ESTIMATORS_HPP

#include <cstddef>
#include <vector>

#include "glab/operators.hpp"
#include "glab/polytope.hpp"
#include "glab/report.hpp"
#include "glab/rng.hpp"
#include "glab/sampling.hpp"

namespace glab {

struct ConcentrationReport {
    double c1_hat = 0.0;  // min over searched directions of (1/m) sum |<y, x_j>|
    double c2_hat = 0.0;  // max
    std::size_t directions = 0;
};

struct Pi1Bounds {
    double lower = 0.0;
    double upper = 0.0;
};

struct ProfileRow {
    std::size_t m = 0;
    EstimateReport volume;            // vol(B_m)
    double normalized = 0.0;          // vol^{1/n} * sqrt(n) / sqrt(ln(1 + m/n))
    double normalized_lo = 0.0;
    double normalized_hi = 0.0;
};

struct PolarVolumeReport {
    EstimateReport vol_body;
    EstimateReport vol_polar;
    double product = 0.0;     // vol(B) * vol(B polar)
    double omega_n_sq = 0.0;  // vol(B_2^n)^2, closed form
    double c = 0.0;           // configured lower-band constant
    bool pass = false;        // product in [c^n * omega^2, omega^2] (CI-widened)
};

struct BfReport {
    EstimateReport volume;  // vol(Q)
    double ratio = 0.0;     // vol^{1/k} * sqrt(k) / (r * sqrt(ln(1 + m/k)))
    double c2 = 0.0;        // configured ceiling
    bool pass = false;
};

struct SmallProbReport {
    EstimateReport estimate;  // empirical mu({x : Tx in gamma*sqrt(n)*B0})
    double bound = 0.0;       // e^{-k}
    bool pass = false;        // estimate.ci_high <= bound
};

/// Hit-or-miss volume estimate: uniform draws in bounding_radius * B_2^n,
/// membership via the exact norm oracles, Wilson interval scaled by the
/// ball volume. For V-polytopes the circumradius is validated against
/// bounding_radius up front.
EstimateReport volume_mc(const VPolytope& body, double bounding_radius, std::size_t trials,
                         RngSeed seed);
EstimateReport volume_mc(const HPolytope& body, double bounding_radius, std::size_t trials,
                         RngSeed seed);

/// Exact volume by hull triangulation, n <= 3 and full-dimensional only.
double volume_exact_lowdim(const VPolytope& body);

/// Mean width 2 * E h_P(u) over uniform sphere directions, with a CLT CI.
EstimateReport mean_width(const VPolytope& p, std::size_t directions, RngSeed seed);

/// For each m in m_list: build the pure model B_m from fresh draws and report
/// vol(B_m)^{1/n} * sqrt(n) / sqrt(ln(1 + m/n)) with the propagated CI.
std::vector<ProfileRow> volume_radius_profile(const DistributionSpec& spec, std::size_t n,
                                              const std::vector<std::size_t>& m_list,
                                              std::size_t trials_per_point, RngSeed seed);

/// Estimates vol(B_m) * vol(B_m polar) and checks the Blaschke-Santalo /
/// Bourgain-Milman band [c^n * omega_n^2, omega_n^2].
PolarVolumeReport polar_volume_check(const SampleSet& samples, std::size_t trials, RngSeed seed,
                                     double c = 0.5);

/// For Q = absconv(points) inside r * B_2^k: checks
/// vol(Q)^{1/k} * sqrt(k) <= C2 * r * sqrt(ln(1 + m/k)).
BfReport bf_bound_check(const Mat& points, double r, std::size_t trials, RngSeed seed,
                        double c2 = 4.0);

/// Sphere extrema of y -> (1/m) sum |<y, x_j>| by random restarts plus
/// projected subgradient descent/ascent. c1_hat is an upper bound of the true
/// min, c2_hat a lower bound of the true max.
ConcentrationReport concentration_constants(const SampleSet& samples, std::size_t restarts,
                                            std::size_t descent_steps, RngSeed seed);

/// upper = 1 / c1_hat; lower = ((1/m) sum |x_j|) / (c2_hat * R) with R the
/// circumradius of B_m. Throws on degenerate samples (c1_hat ~ 0).
Pi1Bounds pi1_bounds(const SampleSet& samples, std::size_t restarts = 64,
                     std::size_t descent_steps = 200, RngSeed seed = {2024, 0});

/// Certified lower bound of d_BM(X_{B_m}, Y) over all Y with a 1-unconditional
/// basis: vol(B_m polar)^{1/n} * n / (2 * pi1_upper * (n^n / n!)^{1/n}).
double unconditional_distance_certificate(const SampleSet& samples, std::size_t trials,
                                          RngSeed seed);

/// Empirical mu({x : Tx in gamma * sqrt(n) * B0}) with pass iff the Wilson
/// upper limit is at most e^{-k}. Requires s_k(T) >= 1.
SmallProbReport fixed_operator_smallprob_check(const DistributionSpec& spec, const LinearMap& t,
                                               const VPolytope& b0, double gamma, std::size_t k,
                                               std::size_t trials, RngSeed seed);

}  // namespace glab

#endif
