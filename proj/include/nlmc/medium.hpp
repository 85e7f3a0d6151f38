#pragma once

#include "nlmc/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

namespace nlmc {

/// Piecewise-constant coefficient, one value per square fine cell
/// (row-major from the bottom-left cell). Both triangles of a cell share it.
class CoefficientField {
public:
    CoefficientField(int n_side, std::vector<double> values);

    int n_side() const noexcept { return n_side_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double cell(int c) const { return values_.at(c); }
    double at_triangle(int t) const { return values_[FineMesh::cell_of(t)]; }
    double kappa_min() const noexcept { return kappa_min_; }
    double kappa_max() const noexcept { return kappa_max_; }
    double contrast() const noexcept { return kappa_max_ / kappa_min_; }

    /// Copy with every value multiplied by `factor` (> 0).
    CoefficientField scaled(double factor) const;

private:
    int n_side_;
    std::vector<double> values_;
    double kappa_min_;
    double kappa_max_;
};

CoefficientField constant_medium(int n_side, double value);

CoefficientField load_medium(const std::filesystem::path& path, int n_side);
void save_medium(const std::filesystem::path& path, const CoefficientField& field);

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    bool operator==(const Rect&) const = default;
};

/// Thick polyline; a cell belongs to it when its center is within width/2 of a segment.
struct Polyline {
    std::vector<Point> points;
    double width = 0.0;
    bool operator==(const Polyline&) const = default;
};

using Shape = std::variant<Rect, Polyline>;

/// Explicit shapes plus an optional number of seeded random channels and inclusions.
struct ChannelSpec {
    std::vector<Shape> shapes;
    int random_channels = 0;
    int random_inclusions = 0;
    std::uint64_t seed = 0;
};

bool cell_in_shape(const Shape& shape, Point center);

/// Shapes of a ChannelSpec after expanding the seeded random features.
std::vector<Shape> expand_shapes(const ChannelSpec& spec);

CoefficientField generate_channel_medium(int n_side, double background, double channel,
                                         const ChannelSpec& spec);

struct ThreeContinuumSpec {
    double background_lo = 1.0;
    double background_hi = 10.0;
    double mid = 1e3;
    double high = 1e4;
    std::vector<Shape> mid_shapes;
    std::vector<Shape> high_shapes;
    std::uint64_t seed = 0;
};

/// Background uniform in the open interval (lo, hi); shapes painted with mid then high.
CoefficientField generate_three_continuum_medium(int n_side, const ThreeContinuumSpec& spec);

/// Binary medium with long thin channels and small inclusions crossing many
/// coarse blocks; the desk-scale stand-in for a channelized reservoir.
ChannelSpec channelized_layout(std::uint64_t seed);
CoefficientField channelized_medium(int n_side, double contrast, std::uint64_t seed);

/// Three-continuum layout: background (1,10), channels at `mid` and inclusions at `high`.
ThreeContinuumSpec three_continuum_layout(std::uint64_t seed);

struct Bin {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double v) const noexcept { return v >= lo && v <= hi; }
    bool operator==(const Bin&) const = default;
};

/// Ordered, disjoint closed intervals.
class ContrastBins {
public:
    explicit ContrastBins(std::vector<Bin> bins);

    const std::vector<Bin>& bins() const noexcept { return bins_; }
    std::size_t size() const noexcept { return bins_.size(); }
    std::optional<int> find(double value) const;

private:
    std::vector<Bin> bins_;
};

/// One continuum K_i^j of a coarse block.
struct Region {
    int block = 0;
    int local = 0;  ///< j within the block
    int bin = 0;
    std::vector<int> triangles;  ///< sorted
    double area = 0.0;
    double kappa_min = 0.0;
    double kappa_max = 0.0;
    double contrast_ratio() const noexcept { return kappa_max / kappa_min; }
};

/// Regions stored block-major, then by bin, then by smallest triangle.
class RegionMap {
public:
    RegionMap(std::vector<Region> regions, int num_blocks, int num_triangles);

    int num_blocks() const noexcept { return static_cast<int>(offsets_.size()) - 1; }
    int total_regions() const noexcept { return static_cast<int>(regions_.size()); }
    int num_regions(int block) const { return offsets_.at(block + 1) - offsets_.at(block); }
    int global_index(int block, int local) const;
    const Region& region(int block, int local) const { return regions_[global_index(block, local)]; }
    const Region& region(int global) const { return regions_.at(global); }
    const std::vector<Region>& regions() const noexcept { return regions_; }
    /// Global region index of every fine triangle.
    const std::vector<int>& triangle_region() const noexcept { return triangle_region_; }
    double contrast_ratio() const noexcept { return contrast_ratio_; }

private:
    std::vector<Region> regions_;
    std::vector<int> offsets_;
    std::vector<int> triangle_region_;
    double contrast_ratio_ = 1.0;
};

RegionMap decompose_regions(const CoefficientField& field, const CoarseGrid& coarse,
                            const ContrastBins& bins, bool split_components = false);

} // namespace nlmc
