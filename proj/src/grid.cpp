#include "nlmc/grid.hpp"

#include "nlmc/errors.hpp"

#include <algorithm>
#include <string>

namespace nlmc {

FineMesh::FineMesh(int n_side) : n_side_(n_side)
{
    if (n_side < 1)
        throw InvalidArgument("fine mesh needs at least one cell per side, got " +
                              std::to_string(n_side));

    const int np = n_side + 1;
    const double h = 1.0 / n_side;
    nodes_.reserve(static_cast<std::size_t>(np) * np);
    for (int iy = 0; iy < np; ++iy)
        for (int ix = 0; ix < np; ++ix) {
            // Exact endpoints so boundary tests compare equal to 0 and 1.
            const double x = (ix == n_side) ? 1.0 : ix * h;
            const double y = (iy == n_side) ? 1.0 : iy * h;
            nodes_.push_back({x, y});
            if (ix == 0 || iy == 0 || ix == n_side || iy == n_side)
                boundary_nodes_.push_back(node_index(ix, iy));
        }

    triangles_.reserve(2 * static_cast<std::size_t>(n_side) * n_side);
    for (int cy = 0; cy < n_side; ++cy)
        for (int cx = 0; cx < n_side; ++cx) {
            const int v00 = node_index(cx, cy);
            const int v10 = node_index(cx + 1, cy);
            const int v11 = node_index(cx + 1, cy + 1);
            const int v01 = node_index(cx, cy + 1);
            triangles_.push_back({v00, v10, v11});
            triangles_.push_back({v00, v11, v01});
        }
    cell_area_.assign(triangles_.size(), 0.5 * h * h);
}

bool FineMesh::is_boundary_node(int node) const
{
    const auto [ix, iy] = node_lattice(node);
    return ix == 0 || iy == 0 || ix == n_side_ || iy == n_side_;
}

std::array<Point, 3> FineMesh::triangle_points(int t) const
{
    const auto& tri = triangles_.at(t);
    return {nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]]};
}

FineMesh build_fine_mesh(int n_side) { return FineMesh(n_side); }

CoarseGrid::CoarseGrid(const FineMesh& mesh, int n_blocks_side)
    : n_side_(n_blocks_side), fine_n_side_(mesh.n_side())
{
    if (n_blocks_side < 1 || fine_n_side_ % n_blocks_side != 0)
        throw InvalidArgument("coarse size " + std::to_string(n_blocks_side) +
                              " does not divide fine size " + std::to_string(fine_n_side_));

    const int r = refinement();
    blocks_.resize(static_cast<std::size_t>(num_blocks()));
    triangle_block_.resize(static_cast<std::size_t>(mesh.num_triangles()));
    for (int cy = 0; cy < fine_n_side_; ++cy)
        for (int cx = 0; cx < fine_n_side_; ++cx) {
            const int b = block_index(cx / r, cy / r);
            const int c = cy * fine_n_side_ + cx;
            for (int k = 0; k < 2; ++k) {
                blocks_[b].push_back(2 * c + k);
                triangle_block_[2 * c + k] = b;
            }
        }
}

double CoarseGrid::triangle_area() const noexcept
{
    const double h = 1.0 / fine_n_side_;
    return 0.5 * h * h;
}

const std::vector<int>& CoarseGrid::block_triangles(int block) const
{
    if (block < 0 || block >= num_blocks())
        throw InvalidArgument("block index " + std::to_string(block) + " out of range");
    return blocks_[block];
}

CoarseGrid build_coarse_grid(const FineMesh& mesh, int n_blocks_side)
{
    return CoarseGrid(mesh, n_blocks_side);
}

bool OversampledRegion::contains_block(int b, const CoarseGrid& coarse) const
{
    const auto [bx, by] = coarse.block_coords(b);
    return bx >= bx0 && bx <= bx1 && by >= by0 && by <= by1;
}

OversampledRegion oversample(const CoarseGrid& coarse, int block, int layers)
{
    if (block < 0 || block >= coarse.num_blocks())
        throw InvalidArgument("block index " + std::to_string(block) + " out of range");
    if (layers < 0)
        throw InvalidArgument("oversampling layers must be non-negative");

    const int N = coarse.n_side();
    const auto [bx, by] = coarse.block_coords(block);
    OversampledRegion region;
    region.block = block;
    region.layers = layers;
    region.bx0 = std::max(0, bx - layers);
    region.by0 = std::max(0, by - layers);
    region.bx1 = std::min(N - 1, bx + layers);
    region.by1 = std::min(N - 1, by + layers);

    for (int y = region.by0; y <= region.by1; ++y)
        for (int x = region.bx0; x <= region.bx1; ++x)
            region.blocks_in.push_back(coarse.block_index(x, y));

    const int r = coarse.refinement();
    const int n = coarse.fine_n_side();
    const int ix0 = region.bx0 * r, ix1 = (region.bx1 + 1) * r;
    const int iy0 = region.by0 * r, iy1 = (region.by1 + 1) * r;
    for (int iy = iy0 + 1; iy < iy1; ++iy)
        for (int ix = ix0 + 1; ix < ix1; ++ix)
            region.interior_nodes.push_back(iy * (n + 1) + ix);

    for (int cy = iy0; cy < iy1; ++cy)
        for (int cx = ix0; cx < ix1; ++cx) {
            const int c = cy * n + cx;
            region.triangles.push_back(2 * c);
            region.triangles.push_back(2 * c + 1);
        }
    return region;
}

OversampledRegion whole_domain(const CoarseGrid& coarse, int block)
{
    return oversample(coarse, block, coarse.n_side());
}

} // namespace nlmc
