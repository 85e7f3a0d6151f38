#pragma once

#include <Eigen/SparseCore>

#include <span>
#include <vector>

namespace nlmc {

struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/// Compressed sparse row matrix. Column indices are sorted and unique per row.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                 std::vector<double> values);

    /// Duplicates are summed in the order they appear, so the result is
    /// reproducible for a fixed triplet order.
    static SparseMatrix from_triplets(int rows, int cols, std::span<const Triplet> triplets);
    static SparseMatrix identity(int n);
    static SparseMatrix from_eigen(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    int nnz() const noexcept { return static_cast<int>(values_.size()); }
    const std::vector<int>& row_ptr() const noexcept { return row_ptr_; }
    const std::vector<int>& col_idx() const noexcept { return col_idx_; }
    const std::vector<double>& values() const noexcept { return values_; }

    double coeff(int r, int c) const;
    std::vector<double> multiply(std::span<const double> x) const;
    std::vector<double> multiply_transpose(std::span<const double> x) const;
    SparseMatrix multiply(const SparseMatrix& other) const;
    SparseMatrix transpose() const;
    SparseMatrix scale_rows(std::span<const double> factors) const;
    /// Symmetric permutation P A P^T with new index perm[old].
    SparseMatrix permute_symmetric(std::span<const int> perm) const;

    double max_abs() const;
    /// max_i sum_j |A_ij|.
    double norm_inf() const;
    /// max |A_ij - A_ji|.
    double symmetry_defect() const;
    bool row_is_zero(int r) const;

    Eigen::SparseMatrix<double> to_eigen() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

} // namespace nlmc
