#include "sparse_lu.hpp"

#include <cmath>
#include <cstddef>

#include "franopt/errors.hpp"

namespace franopt::detail {

void SparseLu::factor(const CscMatrix& a, const std::vector<std::size_t>& basis,
                      double pivot_floor, std::vector<BasisRepair>* repairs) {
    m_ = basis.size();
    l_cols_.assign(m_, {});
    u_cols_.assign(m_, {});
    u_diag_.assign(m_, 0.0);
    pinv_.assign(m_, SIZE_MAX);
    perm_.assign(m_, SIZE_MAX);
    work_.assign(m_, 0.0);

    std::vector<double> x(m_, 0.0);
    std::vector<std::size_t> touched;
    touched.reserve(64);
    std::vector<char> logical_in_basis;  // built lazily on first repair

    for (std::size_t k = 0; k < m_; ++k) {
        // Scatter basis column k into the dense accumulator.
        touched.clear();
        const std::size_t col = basis[k];
        if (col < a.cols) {
            for (std::size_t p = a.col_ptr[col]; p < a.col_ptr[col + 1]; ++p) {
                x[a.row_idx[p]] = a.val[p];
                touched.push_back(a.row_idx[p]);
            }
        } else {
            const std::size_t r = col - a.cols;
            x[r] = 1.0;
            touched.push_back(r);
        }

        // Eliminate with every earlier pivot, in pivot order. Entries above
        // the diagonal become column k of U.
        for (std::size_t j = 0; j < k; ++j) {
            const double xj = x[perm_[j]];
            if (xj == 0.0) continue;
            u_cols_[k].emplace_back(j, xj);
            x[perm_[j]] = 0.0;
            for (const auto& [i, lij] : l_cols_[j]) {
                if (x[i] == 0.0) touched.push_back(i);
                x[i] -= lij * xj;
            }
        }

        // Partial pivoting over the not-yet-pivotal rows.
        std::size_t ipiv = SIZE_MAX;
        double best = 0.0;
        for (std::size_t i : touched) {
            if (pinv_[i] != SIZE_MAX) continue;
            const double t = std::abs(x[i]);
            if (t > best || (t == best && ipiv != SIZE_MAX && i < ipiv)) {
                best = t;
                ipiv = i;
            }
        }
        if (ipiv == SIZE_MAX || best <= pivot_floor) {
            for (std::size_t i : touched) x[i] = 0.0;
            if (repairs == nullptr)
                throw NumericalBreakdown("singular basis at column " +
                                         std::to_string(k));
            // Swap in the logical column of the lowest-index unpivoted row
            // whose logical is not already a basis member; one always
            // exists, because the unpivoted rows outnumber the remaining
            // basis positions by one. That column needs no elimination (no
            // earlier pivot sits on its row) and pivots with a clean 1.0.
            if (logical_in_basis.empty()) {
                logical_in_basis.assign(m_, 0);
                for (std::size_t j : basis)
                    if (j >= a.cols) logical_in_basis[j - a.cols] = 1;
            }
            std::size_t r = SIZE_MAX;
            for (std::size_t i = 0; i < m_; ++i) {
                if (pinv_[i] == SIZE_MAX && !logical_in_basis[i]) {
                    r = i;
                    break;
                }
            }
            if (r == SIZE_MAX)
                throw NumericalBreakdown("unrepairable singular basis at column " +
                                         std::to_string(k));
            if (col >= a.cols) logical_in_basis[col - a.cols] = 0;
            logical_in_basis[r] = 1;
            repairs->push_back({k, r});
            u_cols_[k].clear();
            u_diag_[k] = 1.0;
            pinv_[r] = k;
            perm_[k] = r;
            continue;
        }
        const double pivot = x[ipiv];
        u_diag_[k] = pivot;
        pinv_[ipiv] = k;
        perm_[k] = ipiv;
        x[ipiv] = 0.0;

        for (std::size_t i : touched) {
            if (x[i] == 0.0) continue;
            if (pinv_[i] == SIZE_MAX)
                l_cols_[k].emplace_back(i, x[i] / pivot);
            x[i] = 0.0;
        }
    }
}

void SparseLu::ftran(const std::vector<double>& b, std::vector<double>& x) const {
    std::vector<double>& w = work_;
    for (std::size_t i = 0; i < m_; ++i) w[i] = b[i];

    // L y = P b, traversing pivot columns in order; y lands at w[perm_[j]].
    for (std::size_t j = 0; j < m_; ++j) {
        const double t = w[perm_[j]];
        if (t == 0.0) continue;
        for (const auto& [i, lij] : l_cols_[j]) w[i] -= lij * t;
    }

    // U x = y, backward.
    x.assign(m_, 0.0);
    for (std::size_t k = m_; k-- > 0;) {
        const double xk = w[perm_[k]] / u_diag_[k];
        x[k] = xk;
        if (xk == 0.0) continue;
        for (const auto& [j, ujk] : u_cols_[k]) w[perm_[j]] -= ujk * xk;
    }
}

void SparseLu::btran(const std::vector<double>& c, std::vector<double>& pi) const {
    std::vector<double>& y = work_;
    // U^T y = c, forward over pivot positions.
    for (std::size_t k = 0; k < m_; ++k) {
        double s = c[k];
        for (const auto& [j, ujk] : u_cols_[k]) s -= ujk * y[j];
        y[k] = s / u_diag_[k];
    }
    // L^T v = y, backward; entries of column j live at pivot positions
    // pinv_[i] > j, so v is computed in place of y.
    for (std::size_t j = m_; j-- > 0;) {
        double s = y[j];
        for (const auto& [i, lij] : l_cols_[j]) s -= lij * y[pinv_[i]];
        y[j] = s;
    }
    pi.assign(m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) pi[perm_[k]] = y[k];
}

}  // namespace franopt::detail
