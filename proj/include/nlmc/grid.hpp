#pragma once

#include <array>
#include <utility>
#include <vector>

namespace nlmc {

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

/// Structured triangulation of the unit square.
///
/// Nodes are numbered row-major on the (n+1)x(n+1) lattice starting at the
/// origin. Square cell (cx, cy) has index cy*n + cx and is split along its
/// lower-left to upper-right diagonal into triangles 2c (below the diagonal)
/// and 2c+1 (above). Both triangles are counterclockwise.
class FineMesh {
public:
    explicit FineMesh(int n_side);

    int n_side() const noexcept { return n_side_; }
    double h() const noexcept { return 1.0 / n_side_; }
    int num_nodes() const noexcept { return static_cast<int>(nodes_.size()); }
    int num_triangles() const noexcept { return static_cast<int>(triangles_.size()); }
    int num_cells() const noexcept { return n_side_ * n_side_; }

    const std::vector<Point>& nodes() const noexcept { return nodes_; }
    const std::vector<std::array<int, 3>>& triangles() const noexcept { return triangles_; }
    const std::vector<double>& cell_area() const noexcept { return cell_area_; }
    const std::vector<int>& boundary_nodes() const noexcept { return boundary_nodes_; }

    bool is_boundary_node(int node) const;
    int node_index(int ix, int iy) const noexcept { return iy * (n_side_ + 1) + ix; }
    std::pair<int, int> node_lattice(int node) const noexcept
    {
        return {node % (n_side_ + 1), node / (n_side_ + 1)};
    }
    /// Square cell containing triangle `t`.
    static int cell_of(int t) noexcept { return t / 2; }
    std::array<Point, 3> triangle_points(int t) const;

private:
    int n_side_;
    std::vector<Point> nodes_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<double> cell_area_;
    std::vector<int> boundary_nodes_;
};

FineMesh build_fine_mesh(int n_side);

/// Partition of the fine mesh into N x N square blocks, numbered row-major.
class CoarseGrid {
public:
    CoarseGrid(const FineMesh& mesh, int n_blocks_side);

    int n_side() const noexcept { return n_side_; }
    int fine_n_side() const noexcept { return fine_n_side_; }
    /// Fine cells per block edge.
    int refinement() const noexcept { return fine_n_side_ / n_side_; }
    int num_blocks() const noexcept { return n_side_ * n_side_; }
    double H() const noexcept { return 1.0 / n_side_; }
    double block_area() const noexcept { return H() * H(); }
    double triangle_area() const noexcept;

    const std::vector<int>& block_triangles(int block) const;
    int block_of_triangle(int t) const { return triangle_block_.at(t); }
    int block_index(int bx, int by) const noexcept { return by * n_side_ + bx; }
    std::pair<int, int> block_coords(int block) const noexcept
    {
        return {block % n_side_, block / n_side_};
    }

private:
    int n_side_;
    int fine_n_side_;
    std::vector<std::vector<int>> blocks_;
    std::vector<int> triangle_block_;
};

CoarseGrid build_coarse_grid(const FineMesh& mesh, int n_blocks_side);

/// K_i enlarged by `layers` rings of coarse blocks, clipped at the domain.
/// The union of blocks is always an axis-aligned rectangle [bx0,bx1]x[by0,by1].
struct OversampledRegion {
    int block = 0;
    int layers = 0;
    int bx0 = 0, by0 = 0, bx1 = 0, by1 = 0;
    std::vector<int> blocks_in;       ///< sorted block indices
    std::vector<int> interior_nodes;  ///< sorted fine node indices, Dirichlet trace excluded
    std::vector<int> triangles;       ///< sorted fine triangle indices

    bool contains_block(int b, const CoarseGrid& coarse) const;
    bool covers_domain(const CoarseGrid& coarse) const
    {
        return static_cast<int>(blocks_in.size()) == coarse.num_blocks();
    }
};

OversampledRegion oversample(const CoarseGrid& coarse, int block, int layers);

/// The whole domain as an oversampled region owned by `block`.
OversampledRegion whole_domain(const CoarseGrid& coarse, int block);

} // namespace nlmc
