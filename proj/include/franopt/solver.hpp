#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "franopt/milp.hpp"

namespace franopt {

enum class LpStatus { OPTIMAL, INFEASIBLE, UNBOUNDED };
enum class BnbStatus { OPTIMAL, INFEASIBLE, NODE_LIMIT };

const char* to_string(LpStatus s);
const char* to_string(BnbStatus s);

struct SolverOptions {
    double primal_feas_tol = 1e-7;
    double dual_feas_tol = 1e-9;
    double int_tol = 1e-6;
    double gap_abs = 1e-9;
    double gap_rel = 1e-9;
    double pivot_floor = 1e-11;
    std::size_t node_budget = 1000000;
};

struct LpSolution {
    LpStatus status = LpStatus::OPTIMAL;
    std::vector<double> values;  // one per problem variable
    double objective = 0.0;
    std::size_t iterations = 0;
};

/// Branch-and-bound outcome. OPTIMAL carries a proven optimum (gap below
/// the configured tolerances); NODE_LIMIT means the node budget ran out and
/// the report carries the best incumbent found plus the remaining gap.
struct BnbReport {
    BnbStatus status = BnbStatus::INFEASIBLE;
    double objective = std::numeric_limits<double>::infinity();
    std::vector<double> values;
    std::size_t nodes_explored = 0;
    double best_bound = -std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    double root_bound = -std::numeric_limits<double>::infinity();
    std::size_t lp_iterations = 0;
    /// Cover-cut rows appended at the root to tighten the relaxation
    /// (diagnostic; the cuts never change the optimum).
    std::size_t cover_cuts = 0;
};

/// Solves the LP relaxation (binaries relaxed to [0,1]). Deterministic;
/// anti-cycling via Bland's rule after an initial heuristic-pricing phase.
/// Throws NumericalBreakdown when no acceptable pivot exists.
LpSolution solve_lp(const MilpProblem& problem, const SolverOptions& options = {});

/// Exact minimization by depth-first branch-and-bound on the binary
/// variables: branch on the lowest-index fractional binary (so placement
/// decisions, which come first in the layout, are fixed before routing),
/// explore the 1-branch first, prune against the incumbent, warm-start
/// every node's LP from its parent's optimal basis. Every incumbent is
/// re-validated against the original constraints before acceptance.
BnbReport solve_milp(const MilpProblem& problem, const SolverOptions& options = {});

}  // namespace franopt
