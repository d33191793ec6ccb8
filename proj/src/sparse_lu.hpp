#pragma once

#include <cstddef>
#include <vector>

namespace franopt::detail {

/// Column-compressed sparse matrix, rows x cols.
struct CscMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> col_ptr;  // cols + 1 entries
    std::vector<std::size_t> row_idx;
    std::vector<double> val;
};

/// One substitution made while factorizing a singular basis: the dependent
/// column at basis position `pos` was replaced by the logical unit column
/// of row `row`.
struct BasisRepair {
    std::size_t pos;
    std::size_t row;
};

/// Sparse LU factors of a square basis matrix with partial row pivoting,
/// P B = L U. Built left-looking, one column at a time; triangular solves
/// cost O(nonzeros of the factors).
///
/// Basis columns are either structural columns of a fixed matrix A (indices
/// below A.cols) or logical unit columns e_i (encoded as A.cols + i).
class SparseLu {
  public:
    /// Factorizes the basis. When a column has no pivot above `pivot_floor`
    /// (numerically singular basis): with `repairs` null this throws
    /// NumericalBreakdown; otherwise the column is replaced by the logical
    /// unit column of a still-unpivoted row — which always factors cleanly,
    /// since no earlier pivot can have filled that row in — and the
    /// substitution is recorded for the caller to mirror in its basis
    /// bookkeeping.
    void factor(const CscMatrix& a, const std::vector<std::size_t>& basis,
                double pivot_floor,
                std::vector<BasisRepair>* repairs = nullptr);

    /// Solves B x = b. `b` is indexed by original row; the result is indexed
    /// by basis position (x[k] is the value of the k-th basic variable).
    void ftran(const std::vector<double>& b, std::vector<double>& x) const;

    /// Solves B^T pi = c. `c` is indexed by basis position; `pi` by original
    /// row.
    void btran(const std::vector<double>& c, std::vector<double>& pi) const;

    std::size_t dim() const { return m_; }

  private:
    std::size_t m_ = 0;
    // L is unit lower triangular; only the strictly-below-diagonal part is
    // stored, as (original row, value) pairs per pivot column.
    std::vector<std::vector<std::pair<std::size_t, double>>> l_cols_;
    // U column k holds (pivot position j < k, value) pairs plus the diagonal.
    std::vector<std::vector<std::pair<std::size_t, double>>> u_cols_;
    std::vector<double> u_diag_;
    std::vector<std::size_t> pinv_;  // original row -> pivot position
    std::vector<std::size_t> perm_;  // pivot position -> original row

    mutable std::vector<double> work_;
};

}  // namespace franopt::detail
