#include "franopt/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <memory>
#include <set>
#include <string>
#include <utility>

#include "franopt/errors.hpp"
#include "simplex.hpp"

namespace franopt {

namespace {

using detail::Basis;
using detail::EngineOptions;
using detail::EngineResult;
using detail::EngineStatus;
using detail::SimplexEngine;
using detail::StandardForm;
using detail::VStat;

constexpr double kInf = std::numeric_limits<double>::infinity();

EngineOptions engine_options(const SolverOptions& o) {
    EngineOptions e;
    e.primal_tol = o.primal_feas_tol;
    e.dual_tol = o.dual_feas_tol;
    e.pivot_floor = o.pivot_floor;
    return e;
}

constexpr int kMaxCutRounds = 30;
constexpr double kCoverViolationTol = 1e-6;

/// Cover inequality over a set S of binaries: sum_{j in S} x_j <= |S| - 1.
/// Derived from a row sum(a_j x_j) <= b whose coefficients are all positive:
/// when the members' weights together exceed b they can never all be 1 at
/// once, so the inequality holds at every integral point of the row while
/// cutting off fractional points that lean on several heavy variables.
struct CoverCut {
    std::vector<std::size_t> members;  // ascending variable indices
};

/// Separates violated cover cuts from every knapsack-shaped row of `problem`
/// at the relaxation point `x`. A row qualifies when, normalized to <=, all
/// its terms are positive coefficients on binary variables. Construction is
/// greedy: collect the row's support by descending x* until the weight
/// exceeds the capacity, then drop members whose weight is not needed,
/// lowest x* first -- each drop can only increase the violation since every
/// 1 - x* is nonnegative. Identical member sets are emitted once.
std::vector<CoverCut> separate_cover_cuts(const MilpProblem& problem,
                                          const std::vector<double>& x) {
    std::vector<CoverCut> out;
    std::set<std::vector<std::size_t>> seen;
    const auto& vars = problem.variables();

    for (const Constraint& c : problem.constraints()) {
        if (c.sense == Sense::EQ) continue;
        const double flip = (c.sense == Sense::LE) ? 1.0 : -1.0;
        const double cap = flip * (c.rhs - c.expr.constant);
        if (cap < 0.0) continue;

        // Items carry the <=-normalized coefficients.
        std::vector<std::pair<std::size_t, double>> items;
        items.reserve(c.expr.terms.size());
        double total = 0.0;
        bool knapsack = !c.expr.terms.empty();
        for (const auto& [j, coeff] : c.expr.terms) {
            const double a = flip * coeff;
            if (a <= 0.0 || vars[j].domain != VarDomain::BINARY) {
                knapsack = false;
                break;
            }
            items.emplace_back(j, a);
            total += a;
        }
        // The margin keeps every emitted cover strictly over capacity under
        // floating-point noise; being conservative can only weaken a cut,
        // never invalidate one.
        const double margin = 1e-9 * std::max(1.0, std::abs(cap));
        if (!knapsack || total <= cap + margin) continue;

        std::sort(items.begin(), items.end(),
                  [&](const std::pair<std::size_t, double>& l,
                      const std::pair<std::size_t, double>& r) {
                      if (x[l.first] != x[r.first])
                          return x[l.first] > x[r.first];
                      return l.first < r.first;
                  });

        std::vector<std::pair<std::size_t, double>> cover;
        double weight = 0.0;
        for (const auto& item : items) {
            cover.push_back(item);
            weight += item.second;
            if (weight > cap + margin) break;
        }
        if (weight <= cap + margin) continue;

        for (std::size_t k = cover.size(); k-- > 0;) {
            if (weight - cover[k].second > cap + margin) {
                weight -= cover[k].second;
                cover.erase(cover.begin() + static_cast<std::ptrdiff_t>(k));
            }
        }

        double lhs = 0.0;
        for (const auto& [j, a] : cover) lhs += x[j];
        if (lhs - (static_cast<double>(cover.size()) - 1.0) <=
            kCoverViolationTol)
            continue;

        CoverCut cut;
        cut.members.reserve(cover.size());
        for (const auto& [j, a] : cover) cut.members.push_back(j);
        std::sort(cut.members.begin(), cut.members.end());
        if (seen.insert(cut.members).second) out.push_back(std::move(cut));
    }
    return out;
}

}  // namespace

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::OPTIMAL: return "OPTIMAL";
        case LpStatus::INFEASIBLE: return "INFEASIBLE";
        case LpStatus::UNBOUNDED: return "UNBOUNDED";
    }
    return "?";
}

const char* to_string(BnbStatus s) {
    switch (s) {
        case BnbStatus::OPTIMAL: return "OPTIMAL";
        case BnbStatus::INFEASIBLE: return "INFEASIBLE";
        case BnbStatus::NODE_LIMIT: return "NODE_LIMIT";
    }
    return "?";
}

LpSolution solve_lp(const MilpProblem& problem, const SolverOptions& options) {
    SimplexEngine engine(StandardForm::from(problem),
                         engine_options(options));
    Basis basis;
    EngineResult r = engine.solve(basis, false);

    LpSolution out;
    out.iterations = r.iterations;
    switch (r.status) {
        case EngineStatus::OPTIMAL: out.status = LpStatus::OPTIMAL; break;
        case EngineStatus::INFEASIBLE: out.status = LpStatus::INFEASIBLE; break;
        case EngineStatus::UNBOUNDED: out.status = LpStatus::UNBOUNDED; break;
    }
    if (out.status == LpStatus::OPTIMAL) {
        out.values.assign(r.x.begin(),
                          r.x.begin() + problem.variables().size());
        out.objective = r.objective + problem.objective().constant;
    }
    return out;
}

BnbReport solve_milp(const MilpProblem& problem, const SolverOptions& options) {
    const std::size_t num_structural = problem.variables().size();
    const double constant = problem.objective().constant;

    std::vector<std::size_t> binaries;
    for (const auto& v : problem.variables())
        if (v.domain == VarDomain::BINARY) binaries.push_back(v.index);

    // Branch and bound runs on a strengthened copy: cover cuts appended at
    // the root are satisfied by every integral point, so the optimum, the
    // feasibility status, and the incumbent check against `problem` are all
    // unaffected -- only the relaxation gets tighter.
    MilpProblem work = problem;

    SimplexEngine engine(StandardForm::from(work), engine_options(options));

    struct Node {
        std::vector<std::pair<std::size_t, int>> fixings;
        std::shared_ptr<Basis> start;
        double parent_bound;
    };
    std::vector<Node> stack;

    BnbReport rep;
    double incumbent = kInf;
    std::vector<double> incumbent_values;
    std::size_t nodes = 0;
    std::size_t lp_iters = 0;

    auto prune_threshold = [&]() {
        return incumbent - std::max(options.gap_abs,
                                    options.gap_rel * std::abs(incumbent));
    };

    // Examines a solved node: fathom, accept as incumbent, or branch.
    auto process = [&](const EngineResult& lp,
                       const std::vector<std::pair<std::size_t, int>>& fixings,
                       const Basis& end_basis) {
        if (lp.status == EngineStatus::UNBOUNDED)
            throw Error("relaxation is unbounded; add bounds to continuous "
                        "variables");
        if (lp.status == EngineStatus::INFEASIBLE) return;
        const double bound = lp.objective + constant;
        if (bound >= prune_threshold()) return;

        constexpr std::size_t kNoVar = std::numeric_limits<std::size_t>::max();
        std::size_t branch_var = kNoVar;
        for (std::size_t j : binaries) {
            const double v = lp.x[j];
            if (std::min(v, 1.0 - v) <= options.int_tol) continue;
            branch_var = j;  // lowest fractional index: decision variables
            break;           // precede routing/activation in every layout
        }

        if (branch_var == kNoVar) {
            std::vector<double> vals(lp.x.begin(),
                                     lp.x.begin() + num_structural);
            auto violations = problem.check_feasible(
                vals, options.primal_feas_tol, options.int_tol);
            if (!violations.empty())
                throw NumericalBreakdown(
                    "incumbent failed independent validation: " +
                    violations.front());
            if (bound < incumbent) {
                incumbent = bound;
                incumbent_values = std::move(vals);
            }
            return;
        }

        auto snapshot = std::make_shared<Basis>(end_basis);
        // 0-child pushed first so the 1-branch is explored first: committing
        // to an assignment dives toward integral leaves and a usable
        // incumbent much faster than forbidding one.
        Node one{fixings, snapshot, bound};
        one.fixings.emplace_back(branch_var, 1);
        Node zero{fixings, snapshot, bound};
        zero.fixings.emplace_back(branch_var, 0);
        stack.push_back(std::move(zero));
        stack.push_back(std::move(one));
    };

    const bool trace = std::getenv("FRANOPT_TRACE") != nullptr;
    const auto t_start = std::chrono::steady_clock::now();
    auto since_start = [&]() {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - t_start)
            .count();
    };

    Basis root_basis;
    EngineResult root = engine.solve(root_basis, false);
    ++nodes;
    lp_iters += root.iterations;
    if (root.status == EngineStatus::OPTIMAL)
        rep.root_bound = root.objective + constant;
    if (trace)
        std::fprintf(stderr, "[trace] root solve: obj=%.6f iters=%zu %.2fs\n",
                     root.objective + constant, root.iterations,
                     since_start());

    // Root strengthening rounds. The reported root bound above deliberately
    // stays the plain relaxation value; the cuts only sharpen the bounds the
    // search itself works with. Each round separates at the current root
    // point, appends the violated covers, and re-solves warm: a new row's
    // logical column enters the basis directly, so the previous basis stays
    // valid and the dual simplex repairs the (now infeasible) cut rows.
    for (int round = 0;
         round < kMaxCutRounds && root.status == EngineStatus::OPTIMAL;
         ++round) {
        const auto cuts = separate_cover_cuts(work, root.x);
        if (cuts.empty()) break;
        const std::size_t old_rows = work.constraints().size();
        for (const CoverCut& cut : cuts) {
            LinearExpr e;
            for (std::size_t j : cut.members) e.add(j, 1.0);
            work.add_constraint(
                e, Sense::LE, static_cast<double>(cut.members.size()) - 1.0,
                "cover[" + std::to_string(work.constraints().size()) + "]");
        }
        for (std::size_t r = old_rows; r < work.constraints().size(); ++r) {
            root_basis.vstat.push_back(VStat::BASIC);
            root_basis.basic.push_back(num_structural + r);
        }
        rep.cover_cuts += cuts.size();
        engine = SimplexEngine(StandardForm::from(work),
                               engine_options(options));
        root = engine.solve(root_basis, true);
        lp_iters += root.iterations;
        if (trace)
            std::fprintf(stderr,
                         "[trace] cut round %d: +%zu cuts obj=%.6f iters=%zu "
                         "%.2fs\n",
                         round, cuts.size(), root.objective + constant,
                         root.iterations, since_start());
    }
    process(root, {}, root_basis);

    bool budget_hit = false;
    while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();
        if (node.parent_bound >= prune_threshold()) continue;
        if (nodes >= options.node_budget) {
            stack.push_back(std::move(node));
            budget_hit = true;
            break;
        }

        for (std::size_t j : binaries) {
            const auto& v = problem.variables()[j];
            engine.set_bounds(j, v.lower, v.upper);
        }
        for (const auto& [j, v] : node.fixings)
            engine.set_bounds(j, static_cast<double>(v),
                              static_cast<double>(v));

        Basis work_basis = *node.start;
        EngineResult lp = engine.solve(work_basis, true);
        ++nodes;
        lp_iters += lp.iterations;
        process(lp, node.fixings, work_basis);
        if (trace && nodes % 200 == 0)
            std::fprintf(stderr,
                         "[trace] node %zu: stack=%zu incumbent=%.6f "
                         "lp_iters=%zu %.2fs\n",
                         nodes, stack.size(), incumbent, lp_iters,
                         since_start());
    }

    // Restore the relaxation bounds for any later use of the engine.
    for (std::size_t j : binaries) {
        const auto& v = problem.variables()[j];
        engine.set_bounds(j, v.lower, v.upper);
    }

    rep.nodes_explored = nodes;
    rep.lp_iterations = lp_iters;
    if (budget_hit) {
        rep.status = BnbStatus::NODE_LIMIT;
        double bb = incumbent;
        for (const Node& n : stack) bb = std::min(bb, n.parent_bound);
        rep.best_bound = bb;
        rep.objective = incumbent;
        rep.values = incumbent_values;
        rep.gap = incumbent - bb;
        return rep;
    }

    if (incumbent == kInf) {
        rep.status = BnbStatus::INFEASIBLE;
        return rep;
    }

    rep.status = BnbStatus::OPTIMAL;
    rep.objective = incumbent;
    rep.values = std::move(incumbent_values);
    rep.best_bound = incumbent;
    rep.gap = 0.0;
    if (rep.root_bound >
        rep.objective + std::max(1e-6, 1e-9 * std::abs(rep.objective)))
        throw NumericalBreakdown("root relaxation bound exceeds the proven "
                                 "optimum");
    return rep;
}

}  // namespace franopt
