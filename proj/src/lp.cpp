#include "glab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glab/errors.hpp"
#include "glab/kernels.hpp"

namespace glab {

namespace {

double g_pivot_tol = 1e-12;
constexpr double kFeasTol = 1e-8;
constexpr int kDegenerateStreakLimit = 40;
constexpr long kMaxIterations = 200000;

// Standard-form tableau:  rows x cols coefficient block, column `cols` is the
// rhs, row `rows` is the reduced-cost row (with negated objective value in the
// corner). basis[i] is the column basic in row i.
struct Tableau {
    std::size_t rows, cols;
    std::vector<double> t;  // (rows+1) x (cols+1)
    std::vector<std::size_t> basis;

    Tableau(std::size_t r, std::size_t c) : rows(r), cols(c), t((r + 1) * (c + 1), 0.0), basis(r) {}

    double* row(std::size_t i) { return t.data() + i * (cols + 1); }
    double& at(std::size_t i, std::size_t j) { return t[i * (cols + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return t[i * (cols + 1) + j]; }

    void pivot(std::size_t pr, std::size_t pc) {
        double* prow = row(pr);
        double inv = 1.0 / prow[pc];
        for (std::size_t j = 0; j <= cols; ++j) prow[j] *= inv;
        prow[pc] = 1.0;
        for (std::size_t i = 0; i <= rows; ++i) {
            if (i == pr) continue;
            double f = at(i, pc);
            if (f != 0.0) {
                kernels::axpy(row(i), -f, prow, cols + 1);
                at(i, pc) = 0.0;
            }
        }
        basis[pr] = pc;
    }
};

enum class IterResult { optimal, unbounded };

// `allowed(j)` guards entering columns (used to bar artificials in phase 2).
template <typename Allowed>
IterResult run_simplex(Tableau& tb, Allowed allowed) {
    int degenerate_streak = 0;
    bool bland = false;
    for (long iter = 0; iter < kMaxIterations; ++iter) {
        double* obj = tb.row(tb.rows);
        // pricing
        std::size_t enter = tb.cols;
        if (bland) {
            for (std::size_t j = 0; j < tb.cols; ++j)
                if (allowed(j) && obj[j] < -g_pivot_tol) {
                    enter = j;
                    break;
                }
        } else {
            double best = -g_pivot_tol;
            for (std::size_t j = 0; j < tb.cols; ++j)
                if (allowed(j) && obj[j] < best) {
                    best = obj[j];
                    enter = j;
                }
        }
        if (enter == tb.cols) return IterResult::optimal;

        // ratio test; ties broken by smallest basic index (Bland-compatible)
        std::size_t leave = tb.rows;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < tb.rows; ++i) {
            double a = tb.at(i, enter);
            if (a > g_pivot_tol) {
                double ratio = tb.at(i, tb.cols) / a;
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 &&
                     (leave == tb.rows || tb.basis[i] < tb.basis[leave]))) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
        }
        if (leave == tb.rows) return IterResult::unbounded;

        if (best_ratio < 1e-12) {
            if (++degenerate_streak > kDegenerateStreakLimit) bland = true;
        } else {
            degenerate_streak = 0;
        }
        tb.pivot(leave, enter);
    }
    throw NumericalFailure("solve_lp: iteration limit exceeded");
}

}  // namespace

void set_lp_pivot_tolerance_for_tests(double tol) { g_pivot_tol = tol > 0 ? tol : 1e-12; }

LpSolution solve_lp(const LpProblem& problem) {
    const std::size_t v = problem.num_vars();
    if (problem.eq_rows.rows != problem.eq_rhs.size() ||
        problem.ineq_rows.rows != problem.ineq_rhs.size() ||
        (problem.eq_rows.rows > 0 && problem.eq_rows.cols != v) ||
        (problem.ineq_rows.rows > 0 && problem.ineq_rows.cols != v) ||
        (!problem.lower_bounds.empty() && problem.lower_bounds.size() != v)) {
        throw InvalidInputError("solve_lp: inconsistent dimensions");
    }
    for (double b : problem.eq_rhs)
        if (!std::isfinite(b)) throw InvalidInputError("solve_lp: non-finite rhs");
    for (double b : problem.ineq_rhs)
        if (!std::isfinite(b)) throw InvalidInputError("solve_lp: non-finite rhs");

    // Standard form: shift finite lower bounds to zero, split free variables.
    // Column map: variable i -> column pos_col[i] (and neg_col[i] if free).
    std::vector<std::size_t> pos_col(v), neg_col(v, SIZE_MAX);
    Vec shift(v, 0.0);
    std::size_t ns = 0;
    for (std::size_t i = 0; i < v; ++i) {
        bool free_var = !problem.lower_bounds.empty() && !problem.lower_bounds[i].has_value();
        if (!problem.lower_bounds.empty() && problem.lower_bounds[i].has_value())
            shift[i] = *problem.lower_bounds[i];
        pos_col[i] = ns++;
        if (free_var) neg_col[i] = ns++;
    }
    const std::size_t m_eq = problem.eq_rows.rows;
    const std::size_t m_in = problem.ineq_rows.rows;
    const std::size_t m = m_eq + m_in;
    const std::size_t n_struct = ns + m_in;          // structural + slacks
    const std::size_t n_total = n_struct + m;        // + artificials

    Tableau tb(m, n_total);
    // constraint rows; rhs adjusted by lower-bound shifts
    for (std::size_t r = 0; r < m; ++r) {
        const double* src = r < m_eq ? problem.eq_rows.row(r) : problem.ineq_rows.row(r - m_eq);
        double rhs = r < m_eq ? problem.eq_rhs[r] : problem.ineq_rhs[r - m_eq];
        double* dst = tb.row(r);
        for (std::size_t i = 0; i < v; ++i) {
            dst[pos_col[i]] = src[i];
            if (neg_col[i] != SIZE_MAX) dst[neg_col[i]] = -src[i];
            rhs -= src[i] * shift[i];
        }
        if (r >= m_eq) dst[ns + (r - m_eq)] = 1.0;  // slack
        dst[n_total] = rhs;
        if (rhs < 0.0) {
            for (std::size_t j = 0; j <= n_total; ++j) dst[j] = -dst[j];
        }
        dst[n_struct + r] = 1.0;  // artificial
        tb.basis[r] = n_struct + r;
    }

    // Phase 1: minimize sum of artificials.
    {
        double* obj = tb.row(m);
        std::fill(obj, obj + n_total + 1, 0.0);
        for (std::size_t r = 0; r < m; ++r) obj[n_struct + r] = 1.0;
        // reduce against the artificial basis
        for (std::size_t r = 0; r < m; ++r) kernels::axpy(obj, -1.0, tb.row(r), n_total + 1);
        IterResult res = run_simplex(tb, [](std::size_t) { return true; });
        (void)res;  // phase 1 objective is bounded below by 0
        double art_sum = -tb.at(m, n_total);
        if (art_sum > kFeasTol) {
            return LpSolution{LpStatus::infeasible, {}, 0.0};
        }
        // drive basic artificials (at value 0) out of the basis when possible
        for (std::size_t r = 0; r < m; ++r) {
            if (tb.basis[r] >= n_struct) {
                for (std::size_t j = 0; j < n_struct; ++j) {
                    if (std::fabs(tb.at(r, j)) > 1e-9) {
                        tb.pivot(r, j);
                        break;
                    }
                }
            }
        }
    }

    // Phase 2 objective row: c_j - sum_i c_B(i) * T(i,j), artificials barred.
    {
        double* obj = tb.row(m);
        std::fill(obj, obj + n_total + 1, 0.0);
        auto cost_of = [&](std::size_t col) -> double {
            for (std::size_t i = 0; i < v; ++i) {
                if (pos_col[i] == col) return problem.objective[i];
                if (neg_col[i] == col) return -problem.objective[i];
            }
            return 0.0;
        };
        for (std::size_t i = 0; i < v; ++i) {
            obj[pos_col[i]] += problem.objective[i];
            if (neg_col[i] != SIZE_MAX) obj[neg_col[i]] -= problem.objective[i];
        }
        for (std::size_t r = 0; r < m; ++r) {
            double cb = cost_of(tb.basis[r]);
            if (cb != 0.0) kernels::axpy(obj, -cb, tb.row(r), n_total + 1);
        }
        IterResult res =
            run_simplex(tb, [&](std::size_t j) { return j < n_struct; });
        if (res == IterResult::unbounded) {
            return LpSolution{LpStatus::unbounded, {}, 0.0};
        }
    }

    // Extract solution.
    Vec std_x(n_total, 0.0);
    for (std::size_t r = 0; r < m; ++r) std_x[tb.basis[r]] = tb.at(r, n_total);
    LpSolution sol;
    sol.status = LpStatus::optimal;
    sol.point.resize(v);
    double obj_val = 0.0;
    for (std::size_t i = 0; i < v; ++i) {
        double x = std_x[pos_col[i]];
        if (neg_col[i] != SIZE_MAX) x -= std_x[neg_col[i]];
        sol.point[i] = x + shift[i];
        obj_val += problem.objective[i] * sol.point[i];
    }
    sol.objective_value = obj_val;
    return sol;
}

}  // namespace glab
