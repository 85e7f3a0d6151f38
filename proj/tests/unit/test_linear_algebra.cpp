#include "doctest.h"

#include "helpers.hpp"

#include "nlmc/errors.hpp"
#include "nlmc/oracles.hpp"
#include "nlmc/solvers.hpp"
#include "nlmc/sparse.hpp"

#include <cmath>

using namespace nlmc;

namespace {

oracle::Dense dense_of(const SparseMatrix& a)
{
    oracle::Dense d(a.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k)
            d(r, a.col_idx()[k]) = a.values()[k];
    return d;
}

// 1D Laplacian plus a positive diagonal shift.
SparseMatrix spd_matrix(int n, double shift)
{
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        t.push_back({i, i, 2.0 + shift});
        if (i > 0)
            t.push_back({i, i - 1, -1.0});
        if (i + 1 < n)
            t.push_back({i, i + 1, -1.0});
    }
    return SparseMatrix::from_triplets(n, n, t);
}

} // namespace

TEST_CASE("triplet assembly sums duplicates")
{
    const std::vector<Triplet> t{{0, 1, 2.0}, {1, 0, 1.0}, {0, 1, 3.0}, {1, 1, -1.0}, {0, 0, 4.0}};
    const auto a = SparseMatrix::from_triplets(2, 2, t);
    CHECK(a.nnz() == 4);
    CHECK(a.coeff(0, 1) == 5.0);
    CHECK(a.coeff(0, 0) == 4.0);
    CHECK(a.coeff(1, 1) == -1.0);
    CHECK(a.norm_inf() == 9.0);
    CHECK(a.max_abs() == 5.0);
    CHECK(a.symmetry_defect() == 4.0);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, std::vector<Triplet>{{2, 0, 1.0}}),
                    InvalidArgument);
}

TEST_CASE("sparse products match dense evaluation")
{
    std::vector<Triplet> t;
    const auto v = test::random_vector(40, 3);
    for (int k = 0; k < 40; ++k)
        t.push_back({(k * 7) % 5, (k * 3) % 6, v[k]});
    const auto a = SparseMatrix::from_triplets(5, 6, t);
    const auto d = dense_of(a);
    const auto x = test::random_vector(6, 4);
    const auto y = test::random_vector(5, 5);
    const auto ax = a.multiply(x);
    const auto aty = a.multiply_transpose(y);
    for (int i = 0; i < 5; ++i) {
        double s = 0;
        for (int j = 0; j < 6; ++j)
            s += d(i, j) * x[j];
        CHECK(ax[i] == doctest::Approx(s).epsilon(1e-14));
    }
    for (int j = 0; j < 6; ++j) {
        double s = 0;
        for (int i = 0; i < 5; ++i)
            s += d(i, j) * y[i];
        CHECK(aty[j] == doctest::Approx(s).epsilon(1e-14));
    }
    const auto at = a.transpose();
    CHECK(at.rows() == 6);
    const auto p = a.multiply(at);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            double s = 0;
            for (int k = 0; k < 6; ++k)
                s += d(i, k) * d(j, k);
            CHECK(p.coeff(i, j) == doctest::Approx(s).epsilon(1e-13));
        }
    CHECK(p.symmetry_defect() <= 1e-14);
}

TEST_CASE("row scaling and symmetric permutation")
{
    const auto a = spd_matrix(4, 0.5);
    const std::vector<double> s{1, 2, 3, 4};
    const auto b = a.scale_rows(s);
    CHECK(b.coeff(2, 1) == -3.0);
    const std::vector<int> perm{3, 2, 1, 0};
    const auto p = a.permute_symmetric(perm);
    CHECK(p.coeff(0, 0) == a.coeff(3, 3));
    CHECK(p.coeff(0, 1) == a.coeff(3, 2));
    CHECK(a.row_is_zero(0) == false);
    CHECK(SparseMatrix::from_triplets(2, 2, std::vector<Triplet>{{0, 0, 1.0}}).row_is_zero(1));
}

TEST_CASE("sparse Cholesky agrees with Gaussian elimination")
{
    const auto a = spd_matrix(30, 1e-3);
    const auto b = test::random_vector(30, 9);
    const auto x = solve_spd(a, b);
    const auto ref = oracle::gauss_solve(dense_of(a), b);
    for (int i = 0; i < 30; ++i)
        CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-10));
    CHECK(solve_spd(a, std::vector<double>(30, 0.0)) == std::vector<double>(30, 0.0));
    CHECK_THROWS_AS(SpdSolver(spd_matrix(5, -3.0)), SolverError);
}

TEST_CASE("dense Cholesky reports the degenerate row")
{
    Eigen::MatrixXd s(3, 3);
    s << 4, 2, 2, 2, 2, 1, 2, 1, 1;  // row 2 is half of row 0
    const DenseCholesky ok(Eigen::MatrixXd::Identity(3, 3) * 2.0);
    CHECK(ok.ok());
    CHECK(ok.min_relative_pivot() == doctest::Approx(1.0));
    const DenseCholesky bad(s);
    CHECK_FALSE(bad.ok());
    CHECK(bad.failed_row() == 2);
}

TEST_CASE("saddle solver matches the dense KKT system")
{
    const int n = 12, m = 3;
    const auto a = spd_matrix(n, 0.0);
    std::vector<Triplet> t;
    for (int r = 0; r < m; ++r)
        for (int c = 4 * r; c < 4 * r + 4; ++c)
            t.push_back({r, c, 0.25 * (1.0 + r + 0.1 * c)});
    const auto b = SparseMatrix::from_triplets(m, n, t);
    const auto f = test::random_vector(n, 1);
    const std::vector<double> g{1.0, -0.5, 2.0};

    const auto sol = solve_saddle({a, b, f, g});

    oracle::Dense kkt(n + m, n + m);
    const auto da = dense_of(a), db = dense_of(b);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            kkt(i, j) = da(i, j);
    for (int r = 0; r < m; ++r)
        for (int j = 0; j < n; ++j)
            kkt(n + r, j) = kkt(j, n + r) = db(r, j);
    std::vector<double> rhs(f);
    rhs.insert(rhs.end(), g.begin(), g.end());
    const auto ref = oracle::gauss_solve(kkt, rhs);
    for (int i = 0; i < n; ++i)
        CHECK(sol.primal[i] == doctest::Approx(ref[i]).epsilon(1e-10));
    for (int r = 0; r < m; ++r)
        CHECK(sol.multipliers[r] == doctest::Approx(ref[n + r]).epsilon(1e-10));

    const auto res = saddle_residuals(a, b, f, g, sol);
    CHECK(res.backward_primal() <= 1e-10);
    CHECK(res.backward_constraint() <= 1e-10);
}

TEST_CASE("saddle solver rejects degenerate constraints")
{
    const auto a = spd_matrix(6, 0.0);
    const std::vector<Triplet> zero_row{{0, 0, 1.0}, {0, 1, 1.0}};
    try {
        SaddleSolver(a, SparseMatrix::from_triplets(2, 6, zero_row));
        FAIL("expected degeneracy");
    } catch (const ConstraintDegeneracyError& e) {
        CHECK(e.row() == 1);
    }
    const std::vector<Triplet> dependent{{0, 0, 1.0}, {0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 2.0},
                                         {2, 1, 2.0}};
    try {
        SaddleSolver(a, SparseMatrix::from_triplets(3, 6, dependent));
        FAIL("expected degeneracy");
    } catch (const ConstraintDegeneracyError& e) {
        CHECK(e.row() == 2);
    }
}

TEST_CASE("vector norms")
{
    const std::vector<double> v{3, -4};
    CHECK(norm2(v) == 5.0);
    CHECK(norm_inf(v) == 4.0);
    CHECK(dot(v, v) == 25.0);
}
