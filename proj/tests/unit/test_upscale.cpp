#include "doctest.h"

#include "helpers.hpp"

#include "nlmc/errors.hpp"
#include "nlmc/oracles.hpp"
#include "nlmc/upscale.hpp"

#include <cmath>

using namespace nlmc;

namespace {

struct Coarse {
    FineOperator fine;
    std::vector<BasisFunction> bases;
    ProjectionOperator proj;
    UpscaledSolution sol;
};

Coarse coarse_solve(const test::Problem& p, int layers, const SourceTerm& source = ConstantSource{})
{
    Coarse c;
    c.fine = assemble_fine_operator(p.mesh, p.field, source);
    c.bases = p.builder().build_all(layers);
    c.proj = build_projection(c.bases, p.regions, c.fine.dofs);
    c.sol = upscale_solve(c.proj, c.fine.a, c.fine.b);
    return c;
}

} // namespace

TEST_CASE("projection rows follow region order")
{
    const auto p = test::channel_problem(24, 4, 1e3, 2);
    const auto fine = assemble_fine_operator(p.mesh, p.field, ConstantSource{});
    auto bases = p.builder().build_all(1);
    std::reverse(bases.begin(), bases.end());
    const auto proj = build_projection(bases, p.regions, fine.dofs);
    CHECK(proj.r.rows() == p.regions.total_regions());
    CHECK(proj.r.cols() == fine.dofs.size());
    for (int g = 0; g < p.regions.total_regions(); ++g) {
        const auto& reg = p.regions.region(g);
        CHECK(proj.owners[g] == std::pair{reg.block, reg.local});
    }

    bases.pop_back();
    CHECK_THROWS_AS(build_projection(bases, p.regions, fine.dofs), InvalidArgument);
    bases.push_back(bases.front());
    CHECK_THROWS_AS(build_projection(bases, p.regions, fine.dofs), InvalidArgument);
}

TEST_CASE("projection of region moments is the identity for global bases")
{
    const auto p = test::strip_problem(16, 4);
    const auto fine = assemble_fine_operator(p.mesh, p.field, ConstantSource{});
    const auto proj = build_projection(p.builder().build_all(global_layers), p.regions, fine.dofs);
    const auto mom = assemble_region_moments(p.mesh, p.regions, whole_domain(p.coarse, 0), fine.dofs);
    for (int k = 0; k < mom.matrix.rows(); ++k) {
        std::vector<double> row(static_cast<std::size_t>(fine.dofs.size()));
        for (int d = 0; d < fine.dofs.size(); ++d)
            row[d] = mom.matrix.coeff(k, d) / mom.areas[k];
        const auto col = proj.r.multiply(row);
        for (int g = 0; g < proj.r.rows(); ++g)
            CHECK(col[g] == doctest::Approx(g == mom.region_ids[k] ? 1.0 : 0.0).scale(1.0).epsilon(1e-9));
    }
}

TEST_CASE("coarse system is symmetric positive definite")
{
    const auto c = coarse_solve(test::channel_problem(32, 4), 2);
    CHECK(c.sol.coarse_matrix.symmetry_defect() <= 1e-9 * c.sol.coarse_matrix.max_abs());
    CHECK(c.sol.min_relative_pivot > 0.0);
    const auto x = test::random_vector(static_cast<std::size_t>(c.sol.coarse_matrix.rows()), 17);
    CHECK(dot(x, c.sol.coarse_matrix.multiply(x)) > 0.0);
}

TEST_CASE("zero source gives the zero solution")
{
    const auto c = coarse_solve(test::strip_problem(16, 4), 1, ConstantSource{0.0});
    CHECK(norm_inf(c.sol.ubar) == 0.0);
    CHECK(norm_inf(c.sol.u_ms) == 0.0);
}

TEST_CASE("coarse unknowns are the region means of the downscaled field")
{
    const auto p = test::channel_problem(32, 4, 1e4, 3);
    for (int m : {0, 1, 2}) {
        const auto c = coarse_solve(p, m);
        const auto nodal = c.fine.dofs.to_nodes(c.sol.u_ms, p.mesh.num_nodes());
        for (int g = 0; g < p.regions.total_regions(); ++g)
            CHECK(region_mean(p.mesh, p.regions, g, nodal) ==
                  doctest::Approx(c.sol.ubar[g]).epsilon(1e-9).scale(1e-3));
    }
}

TEST_CASE("upscaled solution matches the dense oracle with global bases")
{
    const int n = 16, N = 4;
    const auto kappa = oracle::strip_medium(n, 1e4);
    const auto a = oracle::stiffness(n, kappa);
    const auto load = oracle::unit_load(n);
    const auto ref = oracle::coarse_solve(
        a, load, oracle::global_bases(n, a, oracle::classify(n, N, kappa, test::as_pairs(test::two_bins()))));
    const auto p = test::strip_problem(n, N);
    const auto c = coarse_solve(p, global_layers);
    REQUIRE(c.sol.ubar.size() == ref.ubar.size());
    for (std::size_t g = 0; g < ref.ubar.size(); ++g)
        CHECK(c.sol.ubar[g] == doctest::Approx(ref.ubar[g]).epsilon(1e-8));
    const auto nodal = c.fine.dofs.to_nodes(c.sol.u_ms, p.mesh.num_nodes());
    for (std::size_t q = 0; q < nodal.size(); ++q)
        CHECK(nodal[q] == doctest::Approx(ref.u_ms[q]).epsilon(1e-8).scale(1e-4));
}

TEST_CASE("full oversampling reproduces the global method")
{
    const auto p = test::strip_problem(16, 4);
    const auto global = coarse_solve(p, global_layers);
    const auto full = coarse_solve(p, 3);
    for (std::size_t g = 0; g < global.sol.ubar.size(); ++g)
        CHECK(full.sol.ubar[g] == doctest::Approx(global.sol.ubar[g]).epsilon(1e-10));
}

TEST_CASE("homogeneous 2x2 coarse grid, frozen coarse values")
{
    const test::Problem p(8, 2, std::vector<double>(64, 1.0), {{0.5, 2.0}});
    const auto c = coarse_solve(p, global_layers);
    const double u_diag = 0.0338021072686888, u_off = 0.0330439548866422;
    CHECK(c.sol.ubar[0] == doctest::Approx(u_diag).epsilon(1e-10));
    CHECK(c.sol.ubar[3] == doctest::Approx(u_diag).epsilon(1e-10));
    CHECK(c.sol.ubar[1] == doctest::Approx(u_off).epsilon(1e-10));
    CHECK(c.sol.ubar[2] == doctest::Approx(u_off).epsilon(1e-10));
}
