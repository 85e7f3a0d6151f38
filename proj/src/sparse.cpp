#include "nlmc/sparse.hpp"

#include "nlmc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nlmc {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values))
{
    if (rows < 0 || cols < 0 || row_ptr_.size() != static_cast<std::size_t>(rows) + 1 ||
        row_ptr_.front() != 0 || col_idx_.size() != values_.size() ||
        static_cast<std::size_t>(row_ptr_.back()) != values_.size())
        throw InvalidArgument("inconsistent CSR arrays");
    for (int r = 0; r < rows; ++r) {
        if (row_ptr_[r] > row_ptr_[r + 1])
            throw InvalidArgument("row offsets must be non-decreasing");
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            if (col_idx_[k] < 0 || col_idx_[k] >= cols)
                throw InvalidArgument("column index out of range in row " + std::to_string(r));
            if (k > row_ptr_[r] && col_idx_[k] <= col_idx_[k - 1])
                throw InvalidArgument("column indices not sorted and unique in row " +
                                      std::to_string(r));
        }
    }
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::span<const Triplet> triplets)
{
    std::vector<int> count(static_cast<std::size_t>(rows) + 1, 0);
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw InvalidArgument("triplet (" + std::to_string(t.row) + ", " +
                                  std::to_string(t.col) + ") out of range");
        ++count[t.row + 1];
    }
    std::partial_sum(count.begin(), count.end(), count.begin());

    // Bucket by row keeping the input order, then merge duplicates per row.
    std::vector<int> cols_tmp(triplets.size());
    std::vector<double> vals_tmp(triplets.size());
    std::vector<int> fill(count.begin(), count.end() - 1);
    for (const auto& t : triplets) {
        const int k = fill[t.row]++;
        cols_tmp[k] = t.col;
        vals_tmp[k] = t.value;
    }

    std::vector<int> row_ptr(static_cast<std::size_t>(rows) + 1, 0);
    std::vector<int> col_idx;
    std::vector<double> values;
    col_idx.reserve(triplets.size());
    values.reserve(triplets.size());
    std::vector<int> order;
    for (int r = 0; r < rows; ++r) {
        order.resize(static_cast<std::size_t>(count[r + 1] - count[r]));
        std::iota(order.begin(), order.end(), count[r]);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return cols_tmp[a] < cols_tmp[b]; });
        for (std::size_t k = 0; k < order.size(); ++k) {
            const int src = order[k];
            if (k > 0 && cols_tmp[src] == col_idx.back())
                values.back() += vals_tmp[src];
            else {
                col_idx.push_back(cols_tmp[src]);
                values.push_back(vals_tmp[src]);
            }
        }
        row_ptr[r + 1] = static_cast<int>(col_idx.size());
    }
    return {rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values)};
}

SparseMatrix SparseMatrix::identity(int n)
{
    std::vector<int> row_ptr(static_cast<std::size_t>(n) + 1), col_idx(static_cast<std::size_t>(n));
    std::iota(row_ptr.begin(), row_ptr.end(), 0);
    std::iota(col_idx.begin(), col_idx.end(), 0);
    return {n, n, std::move(row_ptr), std::move(col_idx), std::vector<double>(n, 1.0)};
}

SparseMatrix SparseMatrix::from_eigen(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m)
{
    Eigen::SparseMatrix<double, Eigen::RowMajor> c = m;
    c.makeCompressed();
    const auto rows = static_cast<int>(c.rows());
    std::vector<int> row_ptr(c.outerIndexPtr(), c.outerIndexPtr() + rows + 1);
    std::vector<int> col_idx(c.innerIndexPtr(), c.innerIndexPtr() + c.nonZeros());
    std::vector<double> values(c.valuePtr(), c.valuePtr() + c.nonZeros());
    return {rows, static_cast<int>(c.cols()), std::move(row_ptr), std::move(col_idx),
            std::move(values)};
}

double SparseMatrix::coeff(int r, int c) const
{
    const auto first = col_idx_.begin() + row_ptr_.at(r);
    const auto last = col_idx_.begin() + row_ptr_.at(r + 1);
    const auto it = std::lower_bound(first, last, c);
    return (it != last && *it == c) ? values_[it - col_idx_.begin()] : 0.0;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const
{
    if (x.size() != static_cast<std::size_t>(cols_))
        throw InvalidArgument("matrix-vector size mismatch");
    std::vector<double> y(static_cast<std::size_t>(rows_), 0.0);
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            s += values_[k] * x[col_idx_[k]];
        y[r] = s;
    }
    return y;
}

std::vector<double> SparseMatrix::multiply_transpose(std::span<const double> x) const
{
    if (x.size() != static_cast<std::size_t>(rows_))
        throw InvalidArgument("matrix-vector size mismatch");
    std::vector<double> y(static_cast<std::size_t>(cols_), 0.0);
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            y[col_idx_[k]] += values_[k] * x[r];
    return y;
}

SparseMatrix SparseMatrix::multiply(const SparseMatrix& other) const
{
    if (cols_ != other.rows_)
        throw InvalidArgument("matrix-matrix size mismatch");
    // Gustavson row-by-row product with a dense accumulator.
    std::vector<double> acc(static_cast<std::size_t>(other.cols_), 0.0);
    std::vector<int> marker(static_cast<std::size_t>(other.cols_), -1);
    std::vector<int> row_ptr(static_cast<std::size_t>(rows_) + 1, 0);
    std::vector<int> col_idx;
    std::vector<double> values;
    std::vector<int> pattern;
    for (int r = 0; r < rows_; ++r) {
        pattern.clear();
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const int mid = col_idx_[k];
            const double a = values_[k];
            for (int q = other.row_ptr_[mid]; q < other.row_ptr_[mid + 1]; ++q) {
                const int c = other.col_idx_[q];
                if (marker[c] != r) {
                    marker[c] = r;
                    acc[c] = 0.0;
                    pattern.push_back(c);
                }
                acc[c] += a * other.values_[q];
            }
        }
        std::sort(pattern.begin(), pattern.end());
        for (int c : pattern) {
            col_idx.push_back(c);
            values.push_back(acc[c]);
        }
        row_ptr[r + 1] = static_cast<int>(col_idx.size());
    }
    return {rows_, other.cols_, std::move(row_ptr), std::move(col_idx), std::move(values)};
}

SparseMatrix SparseMatrix::transpose() const
{
    std::vector<int> row_ptr(static_cast<std::size_t>(cols_) + 1, 0);
    for (int c : col_idx_)
        ++row_ptr[c + 1];
    std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
    std::vector<int> fill(row_ptr.begin(), row_ptr.end() - 1);
    std::vector<int> col_idx(col_idx_.size());
    std::vector<double> values(values_.size());
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const int dst = fill[col_idx_[k]]++;
            col_idx[dst] = r;
            values[dst] = values_[k];
        }
    return {cols_, rows_, std::move(row_ptr), std::move(col_idx), std::move(values)};
}

SparseMatrix SparseMatrix::scale_rows(std::span<const double> factors) const
{
    if (factors.size() != static_cast<std::size_t>(rows_))
        throw InvalidArgument("row scale size mismatch");
    SparseMatrix out = *this;
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            out.values_[k] *= factors[r];
    return out;
}

SparseMatrix SparseMatrix::permute_symmetric(std::span<const int> perm) const
{
    if (rows_ != cols_ || perm.size() != static_cast<std::size_t>(rows_))
        throw InvalidArgument("symmetric permutation needs a square matrix and full permutation");
    std::vector<Triplet> t;
    t.reserve(values_.size());
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            t.push_back({perm[r], perm[col_idx_[k]], values_[k]});
    return from_triplets(rows_, cols_, t);
}

double SparseMatrix::norm_inf() const
{
    double m = 0.0;
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            s += std::abs(values_[k]);
        m = std::max(m, s);
    }
    return m;
}

double SparseMatrix::max_abs() const
{
    double m = 0.0;
    for (double v : values_)
        m = std::max(m, std::abs(v));
    return m;
}

double SparseMatrix::symmetry_defect() const
{
    if (rows_ != cols_)
        throw InvalidArgument("symmetry check needs a square matrix");
    double d = 0.0;
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            d = std::max(d, std::abs(values_[k] - coeff(col_idx_[k], r)));
    return d;
}

bool SparseMatrix::row_is_zero(int r) const
{
    for (int k = row_ptr_.at(r); k < row_ptr_.at(r + 1); ++k)
        if (values_[k] != 0.0)
            return false;
    return true;
}

Eigen::SparseMatrix<double> SparseMatrix::to_eigen() const
{
    Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor>> view(
        rows_, cols_, static_cast<Eigen::Index>(values_.size()), row_ptr_.data(), col_idx_.data(),
        values_.data());
    return Eigen::SparseMatrix<double>(view);
}

double dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw InvalidArgument("dot product size mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += a[k] * b[k];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a)
{
    double m = 0.0;
    for (double v : a)
        m = std::max(m, std::abs(v));
    return m;
}

} // namespace nlmc
