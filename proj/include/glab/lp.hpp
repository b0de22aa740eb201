#ifndef GLAB_LP_HPP
#define GLAB_LP_HPP

#include <optional>
#include <vector>

#include "glab/linalg.hpp"

namespace glab {

/// min objective . x  subject to
///   eq_rows . x == eq_rhs
///   ineq_rows . x <= ineq_rhs
///   x_i >= lower_bounds[i]   (nullopt means free)
struct LpProblem {
    Vec objective;
    Mat eq_rows;
    Vec eq_rhs;
    Mat ineq_rows;
    Vec ineq_rhs;
    // empty vector means all variables >= 0
    std::vector<std::optional<double>> lower_bounds;

    std::size_t num_vars() const { return objective.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Vec point;
    double objective_value = 0.0;
};

/// Dense simplex with Bland's anti-cycling rule (Dantzig pricing until a
/// degenerate streak, then Bland, which guarantees termination).
/// Feasibility tolerance 1e-8, pivot tolerance 1e-12.
LpSolution solve_lp(const LpProblem& problem);

/// Fault-injection hook for the verification battery: overrides the solver's
/// pivot tolerance (<= 0 restores the default 1e-12). Not for production use.
void set_lp_pivot_tolerance_for_tests(double tol);

}  // namespace glab

#endif
