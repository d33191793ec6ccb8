#pragma once

#include <cstddef>
#include <vector>

#include "franopt/milp.hpp"
#include "sparse_lu.hpp"

namespace franopt::detail {

enum class VStat : unsigned char { BASIC, AT_LOWER, AT_UPPER, FREE };

enum class EngineStatus { OPTIMAL, INFEASIBLE, UNBOUNDED };

/// Bounded-variable computational form: minimize cost^T x over
/// A x_struct + I x_logical = rhs, bounds on every variable. Logical
/// variables (one per row) encode the row sense: [0, inf) for <=,
/// (-inf, 0] for >=, [0, 0] for =.
struct StandardForm {
    std::size_t num_structural = 0;
    std::size_t num_rows = 0;
    CscMatrix a;                // num_rows x num_structural
    std::vector<double> lower;  // num_structural + num_rows
    std::vector<double> upper;
    std::vector<double> cost;   // logical costs are zero
    std::vector<double> rhs;

    static StandardForm from(const MilpProblem& problem);

    std::size_t num_vars() const { return num_structural + num_rows; }
};

/// A restorable basis: per-variable status plus the basic variable at each
/// row position. Copyable; used as branch-and-bound warm-start snapshots.
struct Basis {
    std::vector<VStat> vstat;
    std::vector<std::size_t> basic;
};

struct EngineOptions {
    double primal_tol = 1e-7;
    double dual_tol = 1e-9;
    double pivot_floor = 1e-11;
    double ratio_tol = 1e-9;        // minimum |alpha| to act as a blocker
    std::size_t refactor_every = 64;
};

struct EngineResult {
    EngineStatus status = EngineStatus::OPTIMAL;
    double objective = 0.0;       // cost^T x, no constant term
    std::vector<double> x;        // all variables, structural first
    std::size_t iterations = 0;
};

/// Revised simplex over the bounded-variable form: sparse LU basis
/// factorization with product-form eta updates, Dantzig pricing falling
/// back to Bland's rule after 3(m+n) iterations, and three drivers (primal
/// phase 1 and 2, dual) picked by the start's feasibility. Variable bounds
/// may be tightened between solves for branch-and-bound; a basis from a
/// previous solve warm-starts the next one.
class SimplexEngine {
  public:
    SimplexEngine(StandardForm form, EngineOptions options);

    /// Overrides a structural variable's bounds (branching).
    void set_bounds(std::size_t var, double lo, double hi);
    double lower_of(std::size_t var) const { return form_.lower[var]; }
    double upper_of(std::size_t var) const { return form_.upper[var]; }

    /// Solves from `basis` when warm is true, else from the all-logical
    /// basis. On return `basis` holds the final basis either way.
    EngineResult solve(Basis& basis, bool warm);

  private:
    // Basis/factorization plumbing.
    void install_logical_basis(Basis& basis) const;
    void factorize();
    void refresh_primal();
    void refresh_duals();
    void ftran(const std::vector<double>& b, std::vector<double>& out) const;
    void btran(const std::vector<double>& c, std::vector<double>& out) const;
    void column_of(std::size_t var, std::vector<double>& dense) const;
    double dot_column(std::size_t var, const std::vector<double>& row) const;
    void push_eta(std::size_t pos, const std::vector<double>& col);
    void pivot(std::size_t pos, std::size_t entering, double entering_value,
               const std::vector<double>& alpha);

    double nb_value(std::size_t var) const;
    bool is_fixed(std::size_t var) const {
        return form_.lower[var] == form_.upper[var];
    }
    double infeasibility(std::size_t pos) const;

    // Drivers; each returns when its termination condition fires.
    EngineStatus dual_simplex();
    EngineStatus primal_simplex(bool phase_one);
    bool dual_feasible_now() const;
    bool primal_feasible_now() const;
    bool try_flip_to_dual_feasible();

    StandardForm form_;
    EngineOptions opt_;

    Basis* basis_ = nullptr;   // active basis during solve()
    SparseLu lu_;
    std::vector<BasisRepair> repairs_;  // scratch for factorize()
    struct Eta {
        std::size_t pos;
        double diag;
        std::vector<std::pair<std::size_t, double>> entries;  // excludes pos
    };
    std::vector<Eta> etas_;

    std::vector<double> xb_;      // basic values by position
    std::vector<double> duals_;   // reduced costs, all variables
    std::size_t iters_ = 0;
    std::size_t bland_after_ = 0;
    std::size_t hard_cap_ = 0;

    mutable std::vector<double> scratch_col_;
    mutable std::vector<double> scratch_row_;
};

}  // namespace franopt::detail
