#include "nlmc/solvers.hpp"

#include "nlmc/errors.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlmc {

namespace {

constexpr int max_refinement_steps = 4;

Eigen::Map<const Eigen::VectorXd> as_eigen(std::span<const double> v)
{
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

} // namespace

struct SpdSolver::Impl {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
};

SpdSolver::SpdSolver(const SparseMatrix& a) : impl_(std::make_unique<Impl>()), matrix_(a)
{
    if (a.rows() != a.cols())
        throw InvalidArgument("SPD solve needs a square matrix");
    if (a.rows() == 0)
        return;
    impl_->llt.compute(a.to_eigen());
    if (impl_->llt.info() != Eigen::Success)
        throw SolverError("sparse Cholesky failed: matrix is not positive definite");
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

int SpdSolver::size() const noexcept { return matrix_.rows(); }

std::vector<double> SpdSolver::solve(std::span<const double> b, double tol) const
{
    if (b.size() != static_cast<std::size_t>(size()))
        throw InvalidArgument("right-hand side size mismatch");
    const double bnorm = norm_inf(b);
    std::vector<double> x(b.size(), 0.0);
    if (bnorm == 0.0)
        return x;
    const double anorm = matrix_.norm_inf();

    Eigen::VectorXd xe = impl_->llt.solve(as_eigen(b));
    x = to_std(xe);
    double backward = 0.0;
    for (int step = 0;; ++step) {
        auto ax = matrix_.multiply(x);
        Eigen::VectorXd r(static_cast<Eigen::Index>(b.size()));
        for (std::size_t k = 0; k < b.size(); ++k)
            r[static_cast<Eigen::Index>(k)] = b[k] - ax[k];
        backward = r.lpNorm<Eigen::Infinity>() / (anorm * norm_inf(x) + bnorm);
        if (backward <= tol)
            return x;
        if (step == max_refinement_steps)
            break;
        const Eigen::VectorXd dx = impl_->llt.solve(r);
        for (std::size_t k = 0; k < x.size(); ++k)
            x[k] += dx[static_cast<Eigen::Index>(k)];
    }
    std::ostringstream msg;
    msg << "SPD solve stalled at backward error " << backward << " (tolerance " << tol << ")";
    throw SolverError(msg.str(), backward);
}

Eigen::MatrixXd SpdSolver::solve_columns(const Eigen::MatrixXd& rhs) const
{
    if (rhs.rows() != size())
        throw InvalidArgument("right-hand side size mismatch");
    if (size() == 0)
        return rhs;
    return impl_->llt.solve(rhs);
}

std::vector<double> solve_spd(const SparseMatrix& a, std::span<const double> b, double tol)
{
    return SpdSolver(a).solve(b, tol);
}

DenseCholesky::DenseCholesky(const Eigen::MatrixXd& s, double relative_pivot_tol)
{
    const Eigen::Index n = s.rows();
    if (s.cols() != n)
        throw InvalidArgument("Cholesky needs a square matrix");
    double max_diag = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
        max_diag = std::max(max_diag, std::abs(s(k, k)));
    if (max_diag == 0.0)
        max_diag = 1.0;

    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() == Eigen::Success) {
        l_ = llt.matrixL();
        for (Eigen::Index k = 0; k < n; ++k) {
            const double rel = l_(k, k) * l_(k, k) / max_diag;
            if (rel < min_relative_pivot_) {
                min_relative_pivot_ = rel;
                smallest_pivot_row_ = static_cast<int>(k);
            }
        }
        if (min_relative_pivot_ > relative_pivot_tol)
            return;
    }

    // Unblocked right-looking pass to locate the first collapsing pivot.
    l_ = s;
    min_relative_pivot_ = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double d = l_(k, k);
        const double rel = d / max_diag;
        if (rel < min_relative_pivot_) {
            min_relative_pivot_ = rel;
            smallest_pivot_row_ = static_cast<int>(k);
        }
        if (!(rel > relative_pivot_tol)) {
            failed_row_ = static_cast<int>(k);
            return;
        }
        const double lkk = std::sqrt(d);
        l_.col(k).tail(n - k - 1) /= lkk;
        l_(k, k) = lkk;
        for (Eigen::Index j = k + 1; j < n; ++j)
            l_.col(j).tail(n - j) -= l_(j, k) * l_.col(k).tail(n - j);
    }
    l_.triangularView<Eigen::StrictlyUpper>().setZero();
}

Eigen::VectorXd DenseCholesky::solve(const Eigen::VectorXd& b) const
{
    if (!ok())
        throw SolverError("solve with a failed Cholesky factorization");
    const auto tri = l_.triangularView<Eigen::Lower>();
    return tri.transpose().solve(tri.solve(b));
}

Eigen::MatrixXd DenseCholesky::solve(const Eigen::MatrixXd& b) const
{
    if (!ok())
        throw SolverError("solve with a failed Cholesky factorization");
    const auto tri = l_.triangularView<Eigen::Lower>();
    return tri.transpose().solve(tri.solve(b));
}

SaddleSolver::SaddleSolver(const SparseMatrix& a, const SparseMatrix& b)
    : a_(a), b_(b), spd_(a)
{
    if (b.cols() != a.rows())
        throw InvalidArgument("constraint block has " + std::to_string(b.cols()) +
                              " columns, primal block has " + std::to_string(a.rows()));
    const int nc = b.rows();
    row_scale_.resize(static_cast<std::size_t>(nc));
    for (int r = 0; r < nc; ++r) {
        double m = 0.0;
        for (int k = b.row_ptr()[r]; k < b.row_ptr()[r + 1]; ++k)
            m = std::max(m, std::abs(b.values()[k]));
        if (m == 0.0)
            throw ConstraintDegeneracyError(
                "constraint row " + std::to_string(r) + " has no support on free dofs", r);
        row_scale_[r] = 1.0 / m;
    }
    b_scaled_ = b.scale_rows(row_scale_);

    const Eigen::SparseMatrix<double> bt = b_scaled_.transpose().to_eigen();
    w_ = spd_.solve_columns(Eigen::MatrixXd(bt));
    Eigen::MatrixXd s = b_scaled_.to_eigen() * w_;
    s = 0.5 * (s + s.transpose()).eval();
    schur_ = std::make_unique<DenseCholesky>(s);
    if (!schur_->ok())
        throw ConstraintDegeneracyError("constraint row " + std::to_string(schur_->failed_row()) +
                                            " is linearly dependent on the preceding rows",
                                        schur_->failed_row());
}

SaddleSolution SaddleSolver::solve(std::span<const double> f, std::span<const double> g,
                                   double tol) const
{
    const auto n = static_cast<std::size_t>(num_primal());
    const auto nc = static_cast<std::size_t>(num_constraints());
    if (f.size() != n || g.size() != nc)
        throw InvalidArgument("saddle right-hand side size mismatch");

    // Works on the equilibrated system B' = D B, g' = D g, lambda = D lambda'.
    auto solve_once = [&](const Eigen::VectorXd& rf, const Eigen::VectorXd& rg_scaled,
                          Eigen::VectorXd& x, Eigen::VectorXd& lam) {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        if (rf.squaredNorm() > 0)
            y = spd_.solve_columns(rf);
        const auto by = b_scaled_.multiply(std::span<const double>(y.data(), n));
        Eigen::VectorXd t(static_cast<Eigen::Index>(nc));
        for (std::size_t k = 0; k < nc; ++k)
            t[static_cast<Eigen::Index>(k)] = by[k] - rg_scaled[static_cast<Eigen::Index>(k)];
        lam = schur_->solve(t);
        x = y - w_ * lam;
    };

    Eigen::VectorXd fe = as_eigen(f);
    Eigen::VectorXd ge(static_cast<Eigen::Index>(nc));
    for (std::size_t k = 0; k < nc; ++k)
        ge[static_cast<Eigen::Index>(k)] = g[k] * row_scale_[k];

    Eigen::VectorXd x, lam;
    solve_once(fe, ge, x, lam);

    SaddleSolution out;
    SaddleResiduals res;
    for (int step = 0;; ++step) {
        out.primal = to_std(x);
        out.multipliers.resize(nc);
        for (std::size_t k = 0; k < nc; ++k)
            out.multipliers[k] = lam[static_cast<Eigen::Index>(k)] * row_scale_[k];
        res = saddle_residuals(a_, b_, f, g, out);
        if (res.backward_primal() <= tol && res.backward_constraint() <= tol)
            return out;
        if (step == max_refinement_steps)
            break;
        // Residual correction on the scaled system.
        const auto ax = a_.multiply(out.primal);
        const auto btl = b_scaled_.multiply_transpose(std::span<const double>(lam.data(), nc));
        const auto bx = b_scaled_.multiply(out.primal);
        Eigen::VectorXd r1(static_cast<Eigen::Index>(n)), r2(static_cast<Eigen::Index>(nc));
        for (std::size_t k = 0; k < n; ++k)
            r1[static_cast<Eigen::Index>(k)] = f[k] - ax[k] - btl[k];
        for (std::size_t k = 0; k < nc; ++k)
            r2[static_cast<Eigen::Index>(k)] = ge[static_cast<Eigen::Index>(k)] - bx[k];
        Eigen::VectorXd dx, dl;
        solve_once(r1, r2, dx, dl);
        x += dx;
        lam += dl;
    }
    std::ostringstream msg;
    msg << "saddle solve stalled: backward errors " << res.backward_primal() << " (primal), "
        << res.backward_constraint() << " (constraint), tolerance " << tol;
    throw SolverError(msg.str(), std::max(res.backward_primal(), res.backward_constraint()));
}

SaddleSolution solve_saddle(const SaddleSystem& sys, double tol)
{
    return SaddleSolver(sys.a, sys.b).solve(sys.rhs_primal, sys.rhs_constraint, tol);
}

SaddleResiduals saddle_residuals(const SparseMatrix& a, const SparseMatrix& b,
                                 std::span<const double> f, std::span<const double> g,
                                 const SaddleSolution& s)
{
    const auto ax = a.multiply(s.primal);
    const auto btl = b.multiply_transpose(s.multipliers);
    const auto bx = b.multiply(s.primal);
    SaddleResiduals r;
    for (std::size_t k = 0; k < f.size(); ++k)
        r.primal = std::max(r.primal, std::abs(f[k] - ax[k] - btl[k]));
    for (std::size_t k = 0; k < g.size(); ++k)
        r.constraint = std::max(r.constraint, std::abs(g[k] - bx[k]));
    const double xn = norm_inf(s.primal);
    r.primal_scale = a.norm_inf() * xn + b.transpose().norm_inf() * norm_inf(s.multipliers) +
                     norm_inf(f);
    r.constraint_scale = b.norm_inf() * xn + norm_inf(g);
    return r;
}

} // namespace nlmc
