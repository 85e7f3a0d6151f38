#include "doctest.h"

#include "helpers.hpp"

#include "nlmc/analysis.hpp"
#include "nlmc/errors.hpp"
#include "nlmc/oracles.hpp"
#include "nlmc/upscale.hpp"

#include <cmath>

using namespace nlmc;

namespace {

std::vector<double> nodal_of(const FineMesh& mesh, double c, double bx, double by)
{
    std::vector<double> u;
    for (const auto& p : mesh.nodes())
        u.push_back(c + bx * p.x + by * p.y);
    return u;
}

// Block means by the edge-midpoint rule on every triangle, from node coordinates only.
std::vector<double> edge_midpoint_means(const FineMesh& mesh, int N, const std::vector<double>& u)
{
    const int n = mesh.n_side();
    const double h = 1.0 / n;
    std::vector<double> sum(static_cast<std::size_t>(N * N), 0.0);
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            const int v00 = iy * (n + 1) + ix, v10 = v00 + 1, v01 = v00 + n + 1, v11 = v01 + 1;
            const int tris[2][3] = {{v00, v10, v11}, {v00, v11, v01}};
            const int blk = (iy * N / n) * N + ix * N / n;
            for (const auto& t : tris) {
                const double mids = (u[t[0]] + u[t[1]]) / 2 + (u[t[1]] + u[t[2]]) / 2 +
                                    (u[t[2]] + u[t[0]]) / 2;
                sum[blk] += 0.5 * h * h * mids / 3.0;
            }
        }
    for (auto& s : sum)
        s *= N * N;
    return sum;
}

} // namespace

TEST_CASE("block averages of linear fields are their center values")
{
    const FineMesh mesh(12);
    const CoarseGrid coarse(mesh, 3);
    const auto avg = coarse_cell_averages(nodal_of(mesh, 0.5, 2.0, -3.0), mesh, coarse);
    for (int b = 0; b < coarse.num_blocks(); ++b) {
        const auto [bx, by] = coarse.block_coords(b);
        const double cx = (bx + 0.5) / 3, cy = (by + 0.5) / 3;
        CHECK(avg[b] == doctest::Approx(0.5 + 2.0 * cx - 3.0 * cy).epsilon(1e-13));
    }
    const CoarseGrid one(mesh, 1);
    CHECK(coarse_cell_averages(nodal_of(mesh, 0, 1, 0), mesh, one)[0] == doctest::Approx(0.5));
    CHECK(l2_norm(mesh, nodal_of(mesh, 0, 1, 0)) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-13));
    CHECK_THROWS_AS(coarse_cell_averages(std::vector<double>(3), mesh, coarse), InvalidArgument);
}

TEST_CASE("block averages agree with an independent quadrature")
{
    const FineMesh mesh(16);
    const CoarseGrid coarse(mesh, 4);
    const auto u = test::random_vector(static_cast<std::size_t>(mesh.num_nodes()), 31);
    const auto avg = coarse_cell_averages(u, mesh, coarse);
    const auto ref = edge_midpoint_means(mesh, 4, u);
    for (int b = 0; b < coarse.num_blocks(); ++b)
        CHECK(avg[b] == doctest::Approx(ref[b]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("region averages aggregate to block averages")
{
    const auto p = test::channel_problem(32, 4);
    const auto u = test::random_vector(static_cast<std::size_t>(p.mesh.num_nodes()), 4);
    const auto blocks = block_averages_from_regions(region_averages(u, p.mesh, p.regions), p.regions, p.coarse);
    const auto direct = coarse_cell_averages(u, p.mesh, p.coarse);
    for (std::size_t b = 0; b < direct.size(); ++b)
        CHECK(blocks[b] == doctest::Approx(direct[b]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("relative L2 error")
{
    const std::vector<double> f{1.0, 2.0}, ms{1.0, 1.0}, w{1.0, 1.0};
    const auto e = relative_L2_error(f, ms, w);
    CHECK(e.value == doctest::Approx(std::sqrt(0.2)));
    CHECK(e.squared == doctest::Approx(0.2));
    CHECK(relative_L2_error(f, f, w).value == 0.0);
    const std::vector<double> weighted{3.0, 1.0};
    CHECK(relative_L2_error(f, ms, weighted).squared == doctest::Approx(1.0 / 7.0));
    CHECK_THROWS_AS(relative_L2_error(std::vector<double>{0, 0}, ms, w), UndefinedMetricError);
    CHECK_THROWS_AS(relative_L2_error(f, std::vector<double>{1.0}, w), InvalidArgument);
}

TEST_CASE("energy error matches the dense quadratic form")
{
    const int n = 8;
    const auto kappa = oracle::strip_medium(n, 100.0);
    const auto op = assemble_stiffness(FineMesh(n), CoefficientField(n, kappa));
    const auto dense = oracle::stiffness(n, kappa);
    const auto uf = test::random_vector(static_cast<std::size_t>(op.dofs.size()), 1);
    const auto ums = test::random_vector(static_cast<std::size_t>(op.dofs.size()), 2);
    std::vector<double> df((n + 1) * (n + 1), 0.0), dd(df.size(), 0.0);
    for (int d = 0; d < op.dofs.size(); ++d) {
        df[op.dofs.dof_to_node[d]] = uf[d];
        dd[op.dofs.dof_to_node[d]] = uf[d] - ums[d];
    }
    const double ref = std::sqrt(oracle::quad_form(dense, dd) / oracle::quad_form(dense, df));
    CHECK(energy_error(uf, ums, op.a) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(energy_error(uf, uf, op.a) == 0.0);
    CHECK_THROWS_AS(energy_error(std::vector<double>(uf.size(), 0.0), ums, op.a), UndefinedMetricError);
}

TEST_CASE("errors are invariant under scaling of the coefficient")
{
    auto errors = [](double scale) {
        std::vector<double> kappa = oracle::strip_medium(16, 1e3);
        for (auto& k : kappa)
            k *= scale;
        std::vector<Bin> bins;
        for (const auto& b : test::two_bins())
            bins.push_back({b.lo * scale, b.hi * scale});
        const test::Problem p(16, 4, kappa, bins);
        const auto fine = assemble_fine_operator(p.mesh, p.field, ConstantSource{});
        const auto uf = solve_fine(fine, p.mesh.num_nodes());
        const auto proj = build_projection(p.builder().build_all(1), p.regions, fine.dofs);
        const auto sol = upscale_solve(proj, fine.a, fine.b);
        const auto ums = fine.dofs.to_nodes(sol.u_ms, p.mesh.num_nodes());
        const auto areas = std::vector<double>(16, 1.0 / 16);
        return std::pair{
            relative_L2_error(coarse_cell_averages(uf.values, p.mesh, p.coarse),
                              coarse_cell_averages(ums, p.mesh, p.coarse), areas)
                .value,
            energy_error(fine.dofs.from_nodes(uf.values), sol.u_ms, fine.a)};
    };
    const auto base = errors(1.0);
    const auto scaled = errors(1000.0);
    CHECK(base.first > 0.0);
    CHECK(scaled.first == doctest::Approx(base.first).epsilon(1e-7));
    CHECK(scaled.second == doctest::Approx(base.second).epsilon(1e-7));
}

TEST_CASE("decay profile of a local basis")
{
    const auto p = test::channel_problem(40, 8, 1e4, 9);
    const int block = p.coarse.block_index(4, 4);
    const auto psi = p.builder().build(block, 0, 3);
    const auto profile = basis_decay_profile(psi, p.mesh, p.field, p.coarse);
    REQUIRE(profile.size() == 4);
    for (std::size_t r = 0; r < profile.size(); ++r) {
        CHECK(profile[r].ring == static_cast<int>(r));
        CHECK(profile[r].fraction >= 0.0);
        CHECK(profile[r].fraction <= 1.0);
        if (r > 0)
            CHECK(profile[r].fraction <= profile[r - 1].fraction);
    }
    CHECK(profile.back().fraction == 0.0);

    const auto glob = p.builder().build(block, 0, global_layers);
    const auto gp = basis_decay_profile(glob, p.mesh, p.field, p.coarse);
    CHECK(gp.size() == 8);
    CHECK(gp.back().fraction == 0.0);
    CHECK(gp[1].fraction < gp[0].fraction);
}
