#ifndef GLAB_OPERATORS_HPP
#define GLAB_OPERATORS_HPP

#include <cstddef>
#include <vector>

#include "glab/linalg.hpp"
#include "glab/polytope.hpp"
#include "glab/report.hpp"
#include "glab/rng.hpp"

namespace glab {

/// n x n operator with its SVD and determinant cached at construction.
struct LinearMap {
    std::size_t n = 0;
    Mat matrix;
    Vec singular_values;  // descending, nonnegative
    Mat left_frame;       // rows are left singular vectors u_i
    Mat right_frame;      // rows are right singular vectors v_i
    double determinant = 0.0;
};

/// Computes the SVD (one-sided Jacobi, convergence 1e-12) and determinant.
LinearMap make_linear_map(Mat matrix);

struct Subspace {
    std::size_t n = 0;
    Mat basis;  // orthonormal rows
};

/// Orthonormalizes the rows; throws if they are dependent.
Subspace make_subspace(const Mat& rows);

struct MixingReport {
    double beta_target = 0.0;
    double achieved_margin = 0.0;  // smallest singular value of P_{E_perp} T on E
    Subspace witness;
    bool pass = false;
};

struct ShiftInvarianceReport {
    double base_margin = 0.0;
    std::vector<double> shifted_margins;
    double max_deviation = 0.0;
    bool pass = false;  // max_deviation <= 1e-10
};

enum class BallKind { v_op, v_b, m_b };

struct OperatorBallSpec {
    BallKind kind = BallKind::v_op;
    std::size_t n = 0;
    VPolytope body;  // for v_b / m_b
};

/// Exact ||T : X_A -> X_B|| = max over generators g of A of ||T g||_B.
double op_norm_polytopes(const LinearMap& t, const VPolytope& a, const VPolytope& b);

/// |det S|^{-1/n} S; throws on |det| <= 1e-12.
LinearMap det_normalize(const LinearMap& s);

/// Margin of T on a given subspace E: smallest singular value of the
/// (n-k) x k matrix of P_{E_perp} T restricted to E.
MixingReport mixing_check(const LinearMap& t, const Subspace& e, double beta);

/// For an orthogonal projection P of rank s <= n/2: the witness
/// W = span{(u_i + w_i)/sqrt(2)} with u_i in range(P), w_i in ker(P);
/// mixing margin of P on W is exactly 1/2.
Subspace projection_mixing_witness(const LinearMap& p);

/// Margin of T + lambda I on E equals margin of T on E for every lambda.
ShiftInvarianceReport mixing_shift_invariance_test(const LinearMap& t, const Subspace& e,
                                                  const std::vector<double>& lambdas);

/// For a projection P with 1 <= min(s, n-s): 2P is (min(s,n-s), 1)-mixing;
/// the witness comes from P or from I-P depending on which rank is smaller.
MixingReport two_p_mixing_test(const LinearMap& p);

/// Greedy maximal t-separated subset of rejection-sampled ball members,
/// in the operator (spectral) metric. Throws if the budget yields no members.
std::vector<LinearMap> greedy_net(const OperatorBallSpec& spec, double t,
                                  std::size_t sample_budget, RngSeed seed);

/// Fraction of `holdout` rejection-sampled members within t of the net.
double net_covering_fraction(const std::vector<LinearMap>& net, const OperatorBallSpec& spec,
                             double t, std::size_t holdout, RngSeed seed);

/// (C0/t)^{n^2} * (vol_B * vol_cross / (vol_ball * vol_hull))^n.
double entropy_bound(double t, std::size_t n, double vol_b, double vol_hull, double vol_ball,
                     double vol_cross, double c0 = 8.154845485377136);  // default 3e

/// Monte Carlo vol_{n^2}(V_B^n) at n = 2 (to compare with vol(B)^n).
EstimateReport operator_ball_volume_check(const VPolytope& b, std::size_t trials, RngSeed seed);

struct VopVolumeReport {
    EstimateReport estimate;  // vol_{n^2}(V_op^n)
    double c2 = 0.0;          // vol^{1/n^2} * sqrt(n)
};

/// Monte Carlo vol(V_op^n), n <= 3, with the implied constant c2.
VopVolumeReport vop_volume_check(std::size_t n, std::size_t trials, RngSeed seed);

/// Largest singular value (convenience; from the cached SVD).
inline double op_norm_euclidean(const LinearMap& t) {
    return t.singular_values.empty() ? 0.0 : t.singular_values.front();
}

}  // namespace glab

#endif
