#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "franopt/errors.hpp"

namespace franopt::detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
}  // namespace

StandardForm StandardForm::from(const MilpProblem& problem) {
    StandardForm sf;
    sf.num_structural = problem.variables().size();
    sf.num_rows = problem.constraints().size();

    sf.lower.reserve(sf.num_vars());
    sf.upper.reserve(sf.num_vars());
    for (const auto& v : problem.variables()) {
        sf.lower.push_back(v.lower);
        sf.upper.push_back(v.upper);
    }
    for (const auto& c : problem.constraints()) {
        switch (c.sense) {
            case Sense::LE:
                sf.lower.push_back(0.0);
                sf.upper.push_back(kInf);
                break;
            case Sense::GE:
                sf.lower.push_back(-kInf);
                sf.upper.push_back(0.0);
                break;
            case Sense::EQ:
                sf.lower.push_back(0.0);
                sf.upper.push_back(0.0);
                break;
        }
    }

    sf.cost.assign(sf.num_vars(), 0.0);
    for (const auto& [idx, coeff] : problem.objective().terms)
        sf.cost[idx] = coeff;

    sf.rhs.reserve(sf.num_rows);
    for (const auto& c : problem.constraints())
        sf.rhs.push_back(c.rhs - c.expr.constant);

    // Column-compressed A from the row-wise constraints.
    sf.a.rows = sf.num_rows;
    sf.a.cols = sf.num_structural;
    std::vector<std::size_t> count(sf.num_structural, 0);
    for (const auto& c : problem.constraints())
        for (const auto& [idx, coeff] : c.expr.terms) {
            (void)coeff;
            ++count[idx];
        }
    sf.a.col_ptr.assign(sf.num_structural + 1, 0);
    for (std::size_t j = 0; j < sf.num_structural; ++j)
        sf.a.col_ptr[j + 1] = sf.a.col_ptr[j] + count[j];
    sf.a.row_idx.assign(sf.a.col_ptr.back(), 0);
    sf.a.val.assign(sf.a.col_ptr.back(), 0.0);
    std::vector<std::size_t> fill(sf.a.col_ptr.begin(),
                                  sf.a.col_ptr.end() - 1);
    for (std::size_t i = 0; i < sf.num_rows; ++i)
        for (const auto& [idx, coeff] : problem.constraints()[i].expr.terms) {
            sf.a.row_idx[fill[idx]] = i;
            sf.a.val[fill[idx]] = coeff;
            ++fill[idx];
        }
    return sf;
}

SimplexEngine::SimplexEngine(StandardForm form, EngineOptions options)
    : form_(std::move(form)), opt_(options) {}

void SimplexEngine::set_bounds(std::size_t var, double lo, double hi) {
    form_.lower[var] = lo;
    form_.upper[var] = hi;
}

void SimplexEngine::install_logical_basis(Basis& basis) const {
    const std::size_t nv = form_.num_vars();
    basis.vstat.assign(nv, VStat::AT_LOWER);
    basis.basic.assign(form_.num_rows, 0);
    for (std::size_t j = 0; j < form_.num_structural; ++j) {
        if (std::isfinite(form_.lower[j]))
            basis.vstat[j] = VStat::AT_LOWER;
        else if (std::isfinite(form_.upper[j]))
            basis.vstat[j] = VStat::AT_UPPER;
        else
            basis.vstat[j] = VStat::FREE;
    }
    for (std::size_t i = 0; i < form_.num_rows; ++i) {
        basis.basic[i] = form_.num_structural + i;
        basis.vstat[form_.num_structural + i] = VStat::BASIC;
    }
}

void SimplexEngine::factorize() {
    repairs_.clear();
    lu_.factor(form_.a, basis_->basic, opt_.pivot_floor, &repairs_);
    // Mirror any singularity repairs: the dependent variable leaves for a
    // bound and the repairing row's logical variable becomes basic in its
    // place. Callers refresh primal/dual state after every factorization,
    // so the swapped values are picked up immediately.
    for (const BasisRepair& rep : repairs_) {
        const std::size_t out = basis_->basic[rep.pos];
        basis_->vstat[out] = std::isfinite(form_.lower[out])
                                 ? VStat::AT_LOWER
                             : std::isfinite(form_.upper[out])
                                 ? VStat::AT_UPPER
                                 : VStat::FREE;
        const std::size_t in = form_.num_structural + rep.row;
        basis_->basic[rep.pos] = in;
        basis_->vstat[in] = VStat::BASIC;
    }
    etas_.clear();
}

void SimplexEngine::ftran(const std::vector<double>& b,
                          std::vector<double>& out) const {
    lu_.ftran(b, out);
    for (const Eta& e : etas_) {
        const double t = out[e.pos] / e.diag;
        if (t != 0.0)
            for (const auto& [i, v] : e.entries) out[i] -= v * t;
        out[e.pos] = t;
    }
}

void SimplexEngine::btran(const std::vector<double>& c,
                          std::vector<double>& out) const {
    scratch_col_ = c;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        double s = 0.0;
        for (const auto& [i, v] : it->entries) s += v * scratch_col_[i];
        scratch_col_[it->pos] = (scratch_col_[it->pos] - s) / it->diag;
    }
    lu_.btran(scratch_col_, out);
}

void SimplexEngine::column_of(std::size_t var,
                              std::vector<double>& dense) const {
    dense.assign(form_.num_rows, 0.0);
    if (var < form_.num_structural) {
        for (std::size_t p = form_.a.col_ptr[var];
             p < form_.a.col_ptr[var + 1]; ++p)
            dense[form_.a.row_idx[p]] = form_.a.val[p];
    } else {
        dense[var - form_.num_structural] = 1.0;
    }
}

double SimplexEngine::dot_column(std::size_t var,
                                 const std::vector<double>& row) const {
    if (var >= form_.num_structural) return row[var - form_.num_structural];
    double s = 0.0;
    for (std::size_t p = form_.a.col_ptr[var]; p < form_.a.col_ptr[var + 1];
         ++p)
        s += form_.a.val[p] * row[form_.a.row_idx[p]];
    return s;
}

double SimplexEngine::nb_value(std::size_t var) const {
    switch (basis_->vstat[var]) {
        case VStat::AT_LOWER: return form_.lower[var];
        case VStat::AT_UPPER: return form_.upper[var];
        case VStat::FREE: return 0.0;
        case VStat::BASIC: break;
    }
    return 0.0;
}

void SimplexEngine::refresh_primal() {
    std::vector<double> b = form_.rhs;
    for (std::size_t j = 0; j < form_.num_vars(); ++j) {
        if (basis_->vstat[j] == VStat::BASIC) continue;
        const double v = nb_value(j);
        if (v == 0.0) continue;
        if (j < form_.num_structural) {
            for (std::size_t p = form_.a.col_ptr[j];
                 p < form_.a.col_ptr[j + 1]; ++p)
                b[form_.a.row_idx[p]] -= form_.a.val[p] * v;
        } else {
            b[j - form_.num_structural] -= v;
        }
    }
    ftran(b, xb_);
}

void SimplexEngine::refresh_duals() {
    std::vector<double> cb(form_.num_rows);
    for (std::size_t k = 0; k < form_.num_rows; ++k)
        cb[k] = form_.cost[basis_->basic[k]];
    std::vector<double> pi;
    btran(cb, pi);
    duals_.assign(form_.num_vars(), 0.0);
    for (std::size_t j = 0; j < form_.num_vars(); ++j) {
        if (basis_->vstat[j] == VStat::BASIC)
            duals_[j] = 0.0;
        else
            duals_[j] = form_.cost[j] - dot_column(j, pi);
    }
}

void SimplexEngine::push_eta(std::size_t pos, const std::vector<double>& col) {
    Eta e;
    e.pos = pos;
    e.diag = col[pos];
    for (std::size_t i = 0; i < col.size(); ++i)
        if (i != pos && col[i] != 0.0) e.entries.emplace_back(i, col[i]);
    etas_.push_back(std::move(e));
}

void SimplexEngine::pivot(std::size_t pos, std::size_t entering,
                          double entering_value,
                          const std::vector<double>& alpha) {
    basis_->basic[pos] = entering;
    basis_->vstat[entering] = VStat::BASIC;
    xb_[pos] = entering_value;
    push_eta(pos, alpha);
    if (etas_.size() >= opt_.refactor_every) {
        factorize();
        refresh_primal();
        refresh_duals();
    }
}

bool SimplexEngine::primal_feasible_now() const {
    for (std::size_t k = 0; k < form_.num_rows; ++k) {
        const std::size_t j = basis_->basic[k];
        if (xb_[k] < form_.lower[j] - opt_.primal_tol ||
            xb_[k] > form_.upper[j] + opt_.primal_tol)
            return false;
    }
    return true;
}

bool SimplexEngine::dual_feasible_now() const {
    for (std::size_t j = 0; j < form_.num_vars(); ++j) {
        if (basis_->vstat[j] == VStat::BASIC || is_fixed(j)) continue;
        const double d = duals_[j];
        switch (basis_->vstat[j]) {
            case VStat::AT_LOWER:
                if (d < -opt_.dual_tol) return false;
                break;
            case VStat::AT_UPPER:
                if (d > opt_.dual_tol) return false;
                break;
            case VStat::FREE:
                if (std::abs(d) > opt_.dual_tol) return false;
                break;
            case VStat::BASIC: break;
        }
    }
    return true;
}

bool SimplexEngine::try_flip_to_dual_feasible() {
    // First verify every wrong-signed nonbasic has a finite opposite bound.
    for (std::size_t j = 0; j < form_.num_vars(); ++j) {
        if (basis_->vstat[j] == VStat::BASIC || is_fixed(j)) continue;
        const double d = duals_[j];
        if (basis_->vstat[j] == VStat::AT_LOWER && d < -opt_.dual_tol &&
            !std::isfinite(form_.upper[j]))
            return false;
        if (basis_->vstat[j] == VStat::AT_UPPER && d > opt_.dual_tol &&
            !std::isfinite(form_.lower[j]))
            return false;
        if (basis_->vstat[j] == VStat::FREE && std::abs(d) > opt_.dual_tol)
            return false;
    }
    for (std::size_t j = 0; j < form_.num_vars(); ++j) {
        if (basis_->vstat[j] == VStat::BASIC || is_fixed(j)) continue;
        const double d = duals_[j];
        if (basis_->vstat[j] == VStat::AT_LOWER && d < -opt_.dual_tol)
            basis_->vstat[j] = VStat::AT_UPPER;
        else if (basis_->vstat[j] == VStat::AT_UPPER && d > opt_.dual_tol)
            basis_->vstat[j] = VStat::AT_LOWER;
    }
    refresh_primal();
    return true;
}

EngineStatus SimplexEngine::dual_simplex() {
    const std::size_t m = form_.num_rows;
    const std::size_t nv = form_.num_vars();
    std::vector<double> rho;      // BTRAN of the leaving row
    std::vector<double> alpha;    // FTRAN of the entering column
    std::vector<double>& row = scratch_row_;
    row.assign(nv, 0.0);
    std::vector<double> unit(m, 0.0);
    bool just_refactored = false;
    // Rows whose pivot stayed unstable after a fresh factorization get
    // benched until the basis changes; throwing is reserved for the case
    // where every violated row is benched.
    std::vector<char> benched(m, 0);

    while (true) {
        if (++iters_ > hard_cap_)
            throw NumericalBreakdown("dual simplex exceeded iteration cap");
        const bool bland = iters_ > bland_after_;

        // Leaving variable: worst bound violation (Bland: lowest variable
        // index among the violated).
        std::size_t r = kNone;
        double worst = opt_.primal_tol;
        bool benched_violation = false;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t j = basis_->basic[k];
            const double viol = std::max(form_.lower[j] - xb_[k],
                                         xb_[k] - form_.upper[j]);
            if (viol <= opt_.primal_tol) continue;
            if (benched[k]) {
                benched_violation = true;
                continue;
            }
            if (bland) {
                if (r == kNone || j < basis_->basic[r]) r = k;
            } else if (viol > worst) {
                worst = viol;
                r = k;
            }
        }
        if (r == kNone) {
            if (benched_violation)
                throw NumericalBreakdown(
                    "dual pivot below stability floor on every violated row");
            return EngineStatus::OPTIMAL;
        }

        const std::size_t leaving = basis_->basic[r];
        const double sigma = xb_[r] > form_.upper[leaving] ? 1.0 : -1.0;
        const double target =
            sigma > 0 ? form_.upper[leaving] : form_.lower[leaving];

        unit.assign(m, 0.0);
        unit[r] = 1.0;
        btran(unit, rho);

        // Dual ratio test over admissible nonbasic columns.
        std::size_t q = kNone;
        double best_ratio = kInf;
        double best_w = 0.0;
        for (std::size_t j = 0; j < nv; ++j) {
            if (basis_->vstat[j] == VStat::BASIC || is_fixed(j)) {
                row[j] = 0.0;
                continue;
            }
            const double aj = dot_column(j, rho);
            const double w = sigma * aj;
            row[j] = w;
            double d = duals_[j];
            bool ok = false;
            switch (basis_->vstat[j]) {
                case VStat::AT_LOWER:
                    ok = w > opt_.ratio_tol;
                    d = std::max(d, 0.0);
                    break;
                case VStat::AT_UPPER:
                    ok = w < -opt_.ratio_tol;
                    d = std::min(d, 0.0);
                    break;
                case VStat::FREE:
                    ok = std::abs(w) > opt_.ratio_tol;
                    break;
                case VStat::BASIC: break;
            }
            if (!ok) continue;
            const double ratio = d / w;  // >= 0 by the sign pairing
            bool better;
            if (q == kNone)
                better = true;
            else if (bland)
                better = ratio < best_ratio ||
                         (ratio == best_ratio && j < q);
            else
                better = ratio < best_ratio ||
                         (ratio == best_ratio &&
                          (std::abs(w) > std::abs(best_w) ||
                           (std::abs(w) == std::abs(best_w) && j < q)));
            if (better) {
                q = j;
                best_ratio = ratio;
                best_w = w;
            }
        }
        if (q == kNone) return EngineStatus::INFEASIBLE;

        column_of(q, unit);
        ftran(unit, alpha);
        const double arq = alpha[r];
        double alpha_scale = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            alpha_scale = std::max(alpha_scale, std::abs(alpha[k]));
        // The pivot must clear the hard floor and also not be negligible
        // against its own column, or the updated basis drifts singular.
        if (std::abs(arq) < opt_.pivot_floor ||
            std::abs(arq) < 1e-9 * alpha_scale ||
            std::abs(arq - sigma * row[q]) >
                1e-6 * std::max(1.0, std::abs(arq))) {
            if (!just_refactored) {
                factorize();
                refresh_primal();
                refresh_duals();
                just_refactored = true;
                --iters_;
                continue;
            }
            // Still unstable with a fresh factorization: bench this row and
            // let another violated row make progress first.
            benched[r] = 1;
            --iters_;
            continue;
        }
        just_refactored = false;
        std::fill(benched.begin(), benched.end(), 0);

        double s;
        switch (basis_->vstat[q]) {
            case VStat::AT_LOWER: s = 1.0; break;
            case VStat::AT_UPPER: s = -1.0; break;
            default: s = ((xb_[r] - target) / arq) >= 0 ? 1.0 : -1.0; break;
        }
        double delta = (xb_[r] - target) / (s * arq);
        if (delta < 0.0) delta = 0.0;

        const double entering_value = nb_value(q) + s * delta;
        if (delta != 0.0)
            for (std::size_t k = 0; k < m; ++k) xb_[k] -= s * delta * alpha[k];

        // Incremental dual update along the pivot row.
        const double theta = best_ratio;
        if (theta != 0.0)
            for (std::size_t j = 0; j < nv; ++j) {
                if (basis_->vstat[j] == VStat::BASIC || is_fixed(j)) continue;
                duals_[j] -= theta * row[j];
            }
        duals_[q] = 0.0;
        duals_[leaving] = -theta * sigma;

        basis_->vstat[leaving] =
            sigma > 0 ? VStat::AT_UPPER : VStat::AT_LOWER;
        pivot(r, q, entering_value, alpha);
    }
}

EngineStatus SimplexEngine::primal_simplex(bool phase_one) {
    const std::size_t m = form_.num_rows;
    const std::size_t nv = form_.num_vars();
    std::vector<double> pi;
    std::vector<double> alpha;
    std::vector<double> sigma(m, 0.0);
    std::vector<double> unit(m, 0.0);

    while (true) {
        if (++iters_ > hard_cap_)
            throw NumericalBreakdown("primal simplex exceeded iteration cap");
        const bool bland = iters_ > bland_after_;

        // Pricing. Phase 1 minimizes the sum of bound violations of the
        // basics, so its cost vector lives on basis positions and changes
        // every iteration; phase 2 prices the true costs.
        if (phase_one) {
            bool any = false;
            for (std::size_t k = 0; k < m; ++k) {
                const std::size_t j = basis_->basic[k];
                if (xb_[k] < form_.lower[j] - opt_.primal_tol) {
                    sigma[k] = -1.0;
                    any = true;
                } else if (xb_[k] > form_.upper[j] + opt_.primal_tol) {
                    sigma[k] = 1.0;
                    any = true;
                } else {
                    sigma[k] = 0.0;
                }
            }
            if (!any) return EngineStatus::OPTIMAL;  // primal feasible
            btran(sigma, pi);
        } else {
            std::vector<double> cb(m);
            for (std::size_t k = 0; k < m; ++k)
                cb[k] = form_.cost[basis_->basic[k]];
            btran(cb, pi);
        }

        std::size_t q = kNone;
        double best_score = opt_.dual_tol;
        double dir = 0.0;
        for (std::size_t j = 0; j < nv; ++j) {
            if (basis_->vstat[j] == VStat::BASIC || is_fixed(j)) continue;
            const double d = phase_one
                                 ? -dot_column(j, pi)
                                 : form_.cost[j] - dot_column(j, pi);
            double s = 0.0;
            if (basis_->vstat[j] == VStat::AT_LOWER) {
                if (d < -opt_.dual_tol) s = 1.0;
            } else if (basis_->vstat[j] == VStat::AT_UPPER) {
                if (d > opt_.dual_tol) s = -1.0;
            } else {  // FREE
                if (d < -opt_.dual_tol) s = 1.0;
                else if (d > opt_.dual_tol) s = -1.0;
            }
            if (s == 0.0) continue;
            if (bland) {
                q = j;
                dir = s;
                break;
            }
            if (std::abs(d) > best_score) {
                best_score = std::abs(d);
                q = j;
                dir = s;
            }
        }
        if (q == kNone)
            return phase_one ? EngineStatus::INFEASIBLE
                             : EngineStatus::OPTIMAL;

        column_of(q, unit);
        ftran(unit, alpha);

        // Ratio test: first blocking breakpoint, including the entering
        // variable's own opposite bound (a bound flip, no pivot).
        const double vq = nb_value(q);
        double limit = kInf;
        if (dir > 0 && std::isfinite(form_.upper[q]))
            limit = form_.upper[q] - vq;
        else if (dir < 0 && std::isfinite(form_.lower[q]))
            limit = vq - form_.lower[q];
        std::size_t block = kNone;       // basis position
        bool block_at_upper = false;
        double block_abs = 0.0;

        for (std::size_t k = 0; k < m; ++k) {
            const double delta = dir * alpha[k];
            if (std::abs(delta) <= opt_.ratio_tol) continue;
            const std::size_t j = basis_->basic[k];
            const double v = xb_[k];
            const double lo = form_.lower[j];
            const double hi = form_.upper[j];
            double t = kInf;
            bool at_upper = false;
            if (phase_one && v < lo - opt_.primal_tol) {
                // Below its lower bound: blocks only when moving up to it.
                if (delta < 0.0) t = (lo - v) / (-delta);
            } else if (phase_one && v > hi + opt_.primal_tol) {
                if (delta > 0.0) {
                    t = (v - hi) / delta;
                    at_upper = true;
                }
            } else {
                if (delta > 0.0 && std::isfinite(lo))
                    t = (v - lo) / delta;
                else if (delta < 0.0 && std::isfinite(hi)) {
                    t = (hi - v) / (-delta);
                    at_upper = true;
                }
            }
            if (t == kInf) continue;
            if (t < 0.0) t = 0.0;
            bool better;
            if (t < limit - 1e-12)
                better = true;
            else if (t > limit + 1e-12)
                better = false;
            else if (block == kNone)
                better = true;
            else if (bland)
                better = j < basis_->basic[block];
            else
                better = std::abs(delta) > block_abs ||
                         (std::abs(delta) == block_abs &&
                          j < basis_->basic[block]);
            if (better) {
                limit = std::min(limit, t);
                block = k;
                block_at_upper = at_upper;
                block_abs = std::abs(delta);
            }
        }

        if (limit == kInf) {
            if (phase_one)
                throw NumericalBreakdown(
                    "unbounded direction while restoring feasibility");
            return EngineStatus::UNBOUNDED;
        }

        if (block == kNone) {
            // Bound flip: the entering variable crosses to its other bound.
            basis_->vstat[q] = dir > 0 ? VStat::AT_UPPER : VStat::AT_LOWER;
            if (limit != 0.0)
                for (std::size_t k = 0; k < m; ++k)
                    xb_[k] -= dir * limit * alpha[k];
            continue;
        }

        const std::size_t leaving = basis_->basic[block];
        if (limit != 0.0)
            for (std::size_t k = 0; k < m; ++k)
                xb_[k] -= dir * limit * alpha[k];
        basis_->vstat[leaving] =
            block_at_upper ? VStat::AT_UPPER : VStat::AT_LOWER;
        pivot(block, q, vq + dir * limit, alpha);
    }
}

EngineResult SimplexEngine::solve(Basis& basis, bool warm) {
    basis_ = &basis;
    iters_ = 0;
    const std::size_t nv = form_.num_vars();
    const std::size_t m = form_.num_rows;
    bland_after_ = 3 * (m + nv);
    hard_cap_ = std::max<std::size_t>(200000, 60 * (m + nv));

    bool usable = warm && basis.vstat.size() == nv && basis.basic.size() == m;
    if (usable) {
        std::size_t basics = 0;
        for (std::size_t k = 0; k < m && usable; ++k) {
            if (basis.basic[k] >= nv ||
                basis.vstat[basis.basic[k]] != VStat::BASIC)
                usable = false;
        }
        for (std::size_t j = 0; j < nv; ++j)
            if (basis.vstat.size() == nv && basis.vstat[j] == VStat::BASIC)
                ++basics;
        if (basics != m) usable = false;
    }
    if (!usable) install_logical_basis(basis);

    // Statuses must make sense for the current bounds.
    for (std::size_t j = 0; j < nv; ++j) {
        switch (basis.vstat[j]) {
            case VStat::AT_LOWER:
                if (!std::isfinite(form_.lower[j]))
                    basis.vstat[j] = std::isfinite(form_.upper[j])
                                         ? VStat::AT_UPPER
                                         : VStat::FREE;
                break;
            case VStat::AT_UPPER:
                if (!std::isfinite(form_.upper[j]))
                    basis.vstat[j] = std::isfinite(form_.lower[j])
                                         ? VStat::AT_LOWER
                                         : VStat::FREE;
                break;
            case VStat::FREE:
                if (std::isfinite(form_.lower[j]))
                    basis.vstat[j] = VStat::AT_LOWER;
                else if (std::isfinite(form_.upper[j]))
                    basis.vstat[j] = VStat::AT_UPPER;
                break;
            case VStat::BASIC: break;
        }
    }

    try {
        factorize();
    } catch (const NumericalBreakdown&) {
        if (!usable) throw;
        install_logical_basis(basis);
        factorize();
    }
    refresh_primal();
    refresh_duals();

    EngineStatus st = EngineStatus::OPTIMAL;
    for (int attempt = 0;; ++attempt) {
        try {
            for (int round = 0;; ++round) {
                if (primal_feasible_now()) {
                    st = dual_feasible_now() ? EngineStatus::OPTIMAL
                                             : primal_simplex(false);
                } else if (dual_feasible_now() ||
                           try_flip_to_dual_feasible()) {
                    st = dual_simplex();
                } else {
                    st = primal_simplex(true);
                    if (st == EngineStatus::OPTIMAL) {
                        refresh_duals();
                        st = primal_simplex(false);
                    }
                }
                if (st != EngineStatus::OPTIMAL) break;

                // Recompute everything from a fresh factorization and
                // re-verify; eta-file drift occasionally needs one more pass.
                factorize();
                refresh_primal();
                refresh_duals();
                if (primal_feasible_now() && dual_feasible_now()) break;
                if (round >= 3)
                    throw NumericalBreakdown("optimum failed to stabilize");
            }
            break;
        } catch (const NumericalBreakdown&) {
            // An inherited basis can decay into numerical trouble partway
            // through a run (a refactorization finds it singular, a pivot
            // stalls below the stability floor).  Rebuild once from the
            // logical basis and rerun clean; a second failure is real.
            if (attempt >= 1) throw;
            iters_ = 0;
            install_logical_basis(basis);
            factorize();
            refresh_primal();
            refresh_duals();
        }
    }

    EngineResult res;
    res.status = st;
    res.iterations = iters_;
    res.x.assign(nv, 0.0);
    if (st == EngineStatus::OPTIMAL) {
        for (std::size_t j = 0; j < nv; ++j)
            if (basis.vstat[j] != VStat::BASIC) res.x[j] = nb_value(j);
        for (std::size_t k = 0; k < m; ++k) res.x[basis.basic[k]] = xb_[k];
        double obj = 0.0;
        for (std::size_t j = 0; j < nv; ++j) obj += form_.cost[j] * res.x[j];
        res.objective = obj;
    }
    return res;
}

}  // namespace franopt::detail
