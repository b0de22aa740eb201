#ifndef GLAB_POLYTOPE_HPP
#define GLAB_POLYTOPE_HPP

#include <cstddef>
#include <string>

#include "glab/linalg.hpp"
#include "glab/report.hpp"
#include "glab/sampling.hpp"

namespace glab {

/// Centrally symmetric body absconv{±g_1, ..., ±g_k} given by its generators.
struct VPolytope {
    std::size_t n = 0;
    Mat generators;  // k x n
    std::string label;
    bool full_dimensional = false;
    Mat span_basis;  // orthonormal rows spanning the generators (for off-span checks)
};

/// Centrally symmetric body {y : |<u_j, y>| <= 1 for all j}.
struct HPolytope {
    std::size_t n = 0;
    Mat normals;  // rows u_j
    std::string label;
};

/// Inradius/circumradius constants of Proposition-4.2-style sandwiches.
struct ModelConstants {
    double a = 0.0;      // inradius constant
    double b = 0.0;      // circumradius constant
    double eps0 = 0.0;   // lower radius constant
    double c1_split = 0.5;  // block-split constant, s = ceil(c1_split * n)
};

struct InradiusEstimate {
    double inradius = 0.0;      // upper bound of the true inradius (exact for n <= 3)
    double circumradius = 0.0;  // exact: max_j |g_j|
    bool exact = false;
};

struct ZpInclusionReport {
    double q_over_p_bound = 0.0;        // c * q / p
    double worst_lower_ratio = 0.0;     // min over directions of h_q / h_p (>= 1 expected)
    double worst_upper_ratio = 0.0;     // max over directions of h_q / h_p
    std::size_t monotonicity_violations = 0;
    std::size_t upper_violations = 0;
    std::size_t directions = 0;
    bool pass = false;
};

struct DgtReport {
    double q = 0.0;                 // ln(1 + m/n)
    double max_passing_c1 = 0.0;    // min over directions of h_B / h_Zq-hat
    double failure_fraction = 0.0;  // fraction of directions violating given c1
    std::size_t directions = 0;
    bool pass = false;              // failure_fraction == 0 at the given c1
};

VPolytope make_vpolytope(Mat generators, std::string label = "");

/// Basis-enriched model: generators {e_1..e_n} u {x_j / sqrt(n)}.
VPolytope build_basis_enriched(const SampleSet& samples);

/// Pure model: generators {x_j}; may be rank deficient.
VPolytope build_pure(const SampleSet& samples);

/// Exact Minkowski functional by LP over signed hull coefficients.
double minkowski_norm(const VPolytope& p, const Vec& z);

/// h_P(y) = max_j |<g_j, y>| (exact for absolute convex hulls).
double support_function(const VPolytope& p, const Vec& y);

HPolytope polar(const VPolytope& p);

bool membership(const HPolytope& h, const Vec& y);

/// Norm induced by an H-polytope: max_j |<u_j, y>|.
double hnorm(const HPolytope& h, const Vec& y);

/// Sampled + locally refined min of the support function (upper bound of the
/// inradius; exact via facet enumeration when n <= 3), plus exact circumradius.
InradiusEstimate inradius_estimate(const VPolytope& p, std::size_t directions,
                                   std::size_t refine_steps, RngSeed seed);

/// Monte Carlo estimate of the Z_p support (E|<x,y>|^p)^{1/p}.
EstimateReport zp_support_estimate(const DistributionSpec& spec, const Vec& y, double p,
                                   std::size_t trials, RngSeed seed);

/// Verifies h_{Z_p} <= h_{Z_q} <= (c q/p) h_{Z_p} over sampled directions.
ZpInclusionReport zp_inclusion_check(const DistributionSpec& spec, double p, double q,
                                     std::size_t directions, std::size_t trials, double c,
                                     RngSeed seed);

/// Verifies h_{B_m}(u) >= c1 * h-hat_{Z_q}(u) with q = ln(1+m/n), B_m the pure
/// model over the samples and h-hat the empirical Z_q support from the same
/// samples.
DgtReport dgt_inclusion_check(const SampleSet& samples, double c1, std::size_t directions,
                              RngSeed seed);

/// CSV persistence (one generator/normal per row) + JSON sidecar manifest for
/// the label, written to path + ".json".
void write_vpolytope_csv(const VPolytope& p, const std::string& path);
VPolytope read_vpolytope_csv(const std::string& path);
void write_hpolytope_csv(const HPolytope& h, const std::string& path);
HPolytope read_hpolytope_csv(const std::string& path);

/// Uniform direction on the unit sphere.
Vec sphere_direction(Rng& rng, std::size_t n);

}  // namespace glab

#endif
