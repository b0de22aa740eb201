#ifndef GLAB_BM_HPP
#define GLAB_BM_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "glab/operators.hpp"
#include "glab/polytope.hpp"
#include "glab/rng.hpp"
#include "glab/sampling.hpp"

namespace glab {

/// Banach-Mazur distance evidence: upper bounds from search, lower bounds
/// from certified nets. lower <= upper + 1e-6 whenever both are computed.
struct BmEstimate {
    double upper = 0.0;
    LinearMap upper_witness;
    double lower = 0.0;
    std::string lower_method;
};

struct GluskinConfig {
    enum class Model { basis_enriched, pure };
    Model model = Model::basis_enriched;
    std::size_t n = 2;
    std::size_t m = 4;
    DistributionSpec spec;
    double gamma = 0.0;
    std::size_t k = 1;
    std::size_t trials = 1;
    RngSeed seed;
    double c0_min_points = 2.0;  // pure model requires m >= c0 * n
    // search / certification budgets
    std::size_t restarts = 6;
    std::size_t steps = 150;
    double net_resolution = 0.1;
    bool certified_lower = true;    // n = 2 only
    bool force_identical = false;   // both sides from the same stream (d = 1)
};

struct GluskinTrial {
    double lower = 0.0;
    double upper = 0.0;
    double normalized = 0.0;  // upper * ln(1 + m/n) / n
    bool discarded = false;
};

struct GluskinReport {
    std::vector<GluskinTrial> trials;
    std::size_t discarded = 0;
    double median_lower = 0.0;
    double median_upper = 0.0;
    double median_normalized = 0.0;
};

struct SkReport {
    double gamma = 0.0;
    double threshold = 0.0;  // gamma * sqrt(n) / 2
    std::size_t violations = 0;
    std::size_t operators = 0;
    double fraction = 0.0;
};

struct BasisConstantReport {
    double min_projection_norm_found = 0.0;
    std::vector<std::size_t> ranks_scanned;
    std::size_t trials = 0;
};

struct MixingScanReport {
    std::vector<double> norms;
    std::vector<double> margins;
    double min_norm = 0.0;
    double gamma_sqrt_n = 0.0;
};

/// Multistart local search over GL_n minimizing ||T:X->Y|| * ||T^-1:Y->X||
/// (multiplicative Gaussian perturbations, det-normalized). The identity is
/// always evaluated first, so X = Y yields exactly 1.
BmEstimate bm_upper_search(const VPolytope& x, const VPolytope& y, std::size_t restarts,
                           std::size_t steps, RngSeed seed);

/// Certified lower bound at n = 2: exhaustive net over the SVD parametrization
/// R(alpha) diag(s, 1/s) R(beta) (both orientation branches), with the cell
/// slack ||Delta T : Y -> X|| <= R_Y * ||Delta T||_op / r_X. Guaranteed
/// d_BM >= lower. A net too coarse for its slack degrades to lower = 1 with a
/// warning recorded in lower_method.
BmEstimate bm_lower_certified(const VPolytope& x, const VPolytope& y, double net_resolution,
                              RngSeed seed);

/// Independent (B_m, A_m) pairs per trial; certified lower (n = 2) plus search
/// upper, with the normalized statistic upper * ln(1 + m/n) / n. Degenerate
/// pure-model draws are counted as discarded, never silently dropped.
GluskinReport gluskin_pair_experiment(const GluskinConfig& config);

/// Fraction of the given operators T (normalized to s_k(T) = 1, k = floor(n/2))
/// with ||T : X_{B_m} -> Y_{A_m}|| < gamma * sqrt(n) / 2 on one sampled pair.
SkReport sk_criterion_scan(const GluskinConfig& config,
                           const std::vector<LinearMap>& operator_samples);

/// Random orthogonal and oblique projections with ranks in [rank_lo, rank_hi];
/// reports the minimum exact ||P : X_B -> X_B|| found (an upper bound of the
/// infimum over all projections of those ranks).
BasisConstantReport projection_norm_scan(const VPolytope& b, std::size_t rank_lo,
                                         std::size_t rank_hi, std::size_t trials, RngSeed seed);

/// Exact ||T : X_B -> X_B|| and mixing margin (on the witness subspace e) for
/// each member of the family; min norm reported against gamma * sqrt(n).
MixingScanReport mixing_norm_scan(const VPolytope& b, const std::vector<LinearMap>& family,
                                  const Subspace& e, double gamma);

}  // namespace glab

#endif
