#pragma once

#include "nlmc/sparse.hpp"

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <vector>

namespace nlmc {

inline constexpr double default_tolerance = 1e-10;

/// Sparse Cholesky factorization of an SPD matrix with iterative refinement.
class SpdSolver {
public:
    explicit SpdSolver(const SparseMatrix& a);
    ~SpdSolver();
    SpdSolver(SpdSolver&&) noexcept;
    SpdSolver& operator=(SpdSolver&&) noexcept;

    int size() const noexcept;

    /// x with normwise backward error ||b - Ax|| / (||A|| ||x|| + ||b||) <= tol (max norms),
    /// or SolverError carrying the achieved value.
    std::vector<double> solve(std::span<const double> b, double tol = default_tolerance) const;

    /// Plain factor solve of every column of `rhs`, no refinement.
    Eigen::MatrixXd solve_columns(const Eigen::MatrixXd& rhs) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    SparseMatrix matrix_;
};

std::vector<double> solve_spd(const SparseMatrix& a, std::span<const double> b,
                              double tol = default_tolerance);

/// Dense Cholesky that reports the first pivot falling below a relative threshold
/// instead of failing silently.
class DenseCholesky {
public:
    DenseCholesky(const Eigen::MatrixXd& s, double relative_pivot_tol = 1e-13);

    bool ok() const noexcept { return failed_row_ < 0; }
    /// Row whose pivot collapsed, -1 when the factorization succeeded.
    int failed_row() const noexcept { return failed_row_; }
    /// Smallest pivot divided by the largest diagonal entry.
    double min_relative_pivot() const noexcept { return min_relative_pivot_; }
    int smallest_pivot_row() const noexcept { return smallest_pivot_row_; }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

private:
    Eigen::MatrixXd l_;
    int failed_row_ = -1;
    double min_relative_pivot_ = 1.0;
    int smallest_pivot_row_ = -1;
};

/// KKT system  [A B^T; B 0] [x; lambda] = [f; g]  with A SPD.
struct SaddleSystem {
    SparseMatrix a;
    SparseMatrix b;
    std::vector<double> rhs_primal;
    std::vector<double> rhs_constraint;
};

struct SaddleSolution {
    std::vector<double> primal;
    std::vector<double> multipliers;
};

/// Factorizes a saddle-point operator once for many right-hand sides.
///
/// Constraint rows are equilibrated to unit max-norm, A is factored by sparse
/// Cholesky and the dense Schur complement B A^{-1} B^T by DenseCholesky.
/// Multipliers are returned for the caller's (unscaled) rows.
class SaddleSolver {
public:
    SaddleSolver(const SparseMatrix& a, const SparseMatrix& b);

    int num_primal() const noexcept { return a_.rows(); }
    int num_constraints() const noexcept { return b_.rows(); }

    /// Backward error of both block equations within tol (see SaddleResiduals), else SolverError.
    SaddleSolution solve(std::span<const double> rhs_primal, std::span<const double> rhs_constraint,
                         double tol = default_tolerance) const;

private:
    SparseMatrix a_;
    SparseMatrix b_;
    SparseMatrix b_scaled_;
    std::vector<double> row_scale_;
    SpdSolver spd_;
    Eigen::MatrixXd w_;  ///< A^{-1} B_scaled^T
    std::unique_ptr<DenseCholesky> schur_;
};

SaddleSolution solve_saddle(const SaddleSystem& sys, double tol = default_tolerance);

/// Residual norms of a saddle solution, for checks and tests.
/// Max-norm residuals of both block equations and the scales of their backward errors.
struct SaddleResiduals {
    double primal = 0.0;            ///< ||f - A x - B^T lambda||
    double constraint = 0.0;        ///< ||g - B x||
    double primal_scale = 0.0;      ///< ||A|| ||x|| + ||B^T|| ||lambda|| + ||f||
    double constraint_scale = 0.0;  ///< ||B|| ||x|| + ||g||

    double backward_primal() const noexcept
    {
        return primal_scale > 0 ? primal / primal_scale : primal;
    }
    double backward_constraint() const noexcept
    {
        return constraint_scale > 0 ? constraint / constraint_scale : constraint;
    }
};

SaddleResiduals saddle_residuals(const SparseMatrix& a, const SparseMatrix& b,
                                 std::span<const double> f, std::span<const double> g,
                                 const SaddleSolution& s);

} // namespace nlmc
