#ifndef GLAB_ORACLES_HPP
#define GLAB_ORACLES_HPP

#include <cstddef>
#include <string>

#include "glab/operators.hpp"
#include "glab/polytope.hpp"

namespace glab {

/// Independent brute-force references for tests. These deliberately use
/// different algorithms than the primary paths (facet enumeration and grids
/// instead of LP, series instead of sampling) so they do not share bugs.
struct OracleResult {
    double value = 0.0;
    std::string method;
    std::string resolution;
};

/// Lower estimate of ||T : X_A -> X_B|| by maximizing over sampled boundary
/// points of A; norms evaluated via exact facet enumeration (n <= 3 only),
/// never via the LP oracle. Always <= the exact value.
OracleResult opnorm_sphere_oracle(const LinearMap& t, const VPolytope& a, const VPolytope& b,
                                  std::size_t directions, RngSeed seed);

/// Exhaustive grid over determinant-1 maps R(theta) * shear(c) * diag(r, 1/r)
/// (plus a reflection branch): an upper bound of d_BM(X, Y) at n = 2.
OracleResult bm_grid_oracle_2d(const VPolytope& x, const VPolytope& y,
                               std::size_t grid_resolution);

/// (E|g|^p)^{1/p} for a standard Gaussian: (2^{p/2} Gamma((p+1)/2)/sqrt(pi))^{1/p}.
double gaussian_moment_oracle(double p);

/// P(chi^2_n >= threshold) via regularized incomplete gamma
/// (series / continued fraction), absolute error <= 1e-10.
double chi2_tail_oracle(std::size_t n, double threshold);

}  // namespace glab

#endif
