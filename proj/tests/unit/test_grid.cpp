#include "doctest.h"

#include "nlmc/errors.hpp"
#include "nlmc/grid.hpp"

#include <algorithm>
#include <numeric>

using namespace nlmc;

TEST_CASE("fine mesh counts and numbering")
{
    const FineMesh m(4);
    CHECK(m.num_nodes() == 25);
    CHECK(m.num_triangles() == 32);
    CHECK(m.num_cells() == 16);
    CHECK(m.boundary_nodes().size() == 16);
    CHECK(m.node_index(2, 3) == 17);
    CHECK(m.node_lattice(17) == std::pair{2, 3});
    CHECK(m.nodes()[m.node_index(4, 4)] == Point{1.0, 1.0});
    CHECK(FineMesh::cell_of(7) == 3);
    CHECK_THROWS_AS(FineMesh(0), InvalidArgument);
}

TEST_CASE("triangles are counterclockwise and tile the square")
{
    const FineMesh m(6);
    double total = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto p = m.triangle_points(t);
        const double det = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
        CHECK(det > 0);
        CHECK(det / 2 == doctest::Approx(m.cell_area()[t]));
        total += m.cell_area()[t];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));

    // Cell 0 is split along the rising diagonal.
    const auto& lower = m.triangles()[0];
    const auto& upper = m.triangles()[1];
    CHECK(lower == std::array<int, 3>{0, 1, 8});
    CHECK(upper == std::array<int, 3>{0, 8, 7});
}

TEST_CASE("boundary nodes")
{
    const FineMesh m(3);
    for (int p = 0; p < m.num_nodes(); ++p) {
        const auto [ix, iy] = m.node_lattice(p);
        const bool edge = ix == 0 || iy == 0 || ix == 3 || iy == 3;
        CHECK(m.is_boundary_node(p) == edge);
    }
}

TEST_CASE("coarse grid partitions the triangles")
{
    const FineMesh m(8);
    const CoarseGrid c(m, 4);
    CHECK(c.refinement() == 2);
    CHECK(c.num_blocks() == 16);
    CHECK(c.H() == 0.25);
    std::vector<int> seen(static_cast<std::size_t>(m.num_triangles()), 0);
    for (int b = 0; b < c.num_blocks(); ++b) {
        CHECK(c.block_triangles(b).size() == 8);
        for (int t : c.block_triangles(b)) {
            ++seen[t];
            CHECK(c.block_of_triangle(t) == b);
        }
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
    CHECK(c.block_index(1, 2) == 9);
    CHECK(c.block_coords(9) == std::pair{1, 2});
}

TEST_CASE("coarse size must divide the fine size")
{
    const FineMesh m(10);
    CHECK_THROWS_WITH_AS(CoarseGrid(m, 4), "coarse size 4 does not divide fine size 10",
                         InvalidArgument);
}

TEST_CASE("oversampling is clipped at the domain")
{
    const FineMesh m(12);
    const CoarseGrid c(m, 6);

    const auto k0 = oversample(c, c.block_index(2, 3), 0);
    CHECK(k0.blocks_in == std::vector<int>{c.block_index(2, 3)});
    CHECK(k0.interior_nodes.size() == 1);  // 2x2 cells have one interior node

    const auto corner = oversample(c, 0, 2);
    CHECK(corner.bx0 == 0);
    CHECK(corner.by0 == 0);
    CHECK(corner.bx1 == 2);
    CHECK(corner.by1 == 2);
    CHECK(corner.blocks_in.size() == 9);
    CHECK(corner.triangles.size() == 9 * 8);
    CHECK(corner.interior_nodes.size() == 5 * 5);
    CHECK(corner.contains_block(c.block_index(2, 2), c));
    CHECK_FALSE(corner.contains_block(c.block_index(3, 0), c));

    const auto mid = oversample(c, c.block_index(3, 3), 1);
    CHECK(mid.blocks_in.size() == 9);
    CHECK_FALSE(mid.covers_domain(c));

    const auto all = oversample(c, c.block_index(3, 3), 5);
    CHECK(all.covers_domain(c));
    const auto whole = whole_domain(c, 0);
    CHECK(whole.covers_domain(c));
    CHECK(whole.interior_nodes.size() == 11 * 11);
    CHECK(all.interior_nodes == whole.interior_nodes);

    CHECK_THROWS_AS(oversample(c, -1, 1), InvalidArgument);
    CHECK_THROWS_AS(oversample(c, 0, -1), InvalidArgument);
}

TEST_CASE("oversampled regions nest as layers grow")
{
    const FineMesh m(16);
    const CoarseGrid c(m, 8);
    const int b = c.block_index(3, 5);
    for (int k = 0; k < 8; ++k) {
        const auto inner = oversample(c, b, k);
        const auto outer = oversample(c, b, k + 1);
        CHECK(std::includes(outer.blocks_in.begin(), outer.blocks_in.end(), inner.blocks_in.begin(),
                            inner.blocks_in.end()));
        CHECK(std::includes(outer.interior_nodes.begin(), outer.interior_nodes.end(),
                            inner.interior_nodes.begin(), inner.interior_nodes.end()));
    }
}
