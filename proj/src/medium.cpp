#include "nlmc/medium.hpp"

#include "nlmc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace nlmc {

namespace {

/// Uniform double in [0,1) from the top 53 bits; stable across standard libraries.
double unit_uniform(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return lo + (hi - lo) * unit_uniform(rng);
}

/// Uniform in the open interval (lo, hi).
double uniform_open(std::mt19937_64& rng, double lo, double hi)
{
    for (;;) {
        const double v = uniform(rng, lo, hi);
        if (v > lo && v < hi)
            return v;
    }
}

double segment_distance(Point p, Point a, Point b)
{
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

bool in_unit_square(Point p) { return p.x >= 0 && p.x <= 1 && p.y >= 0 && p.y <= 1; }

void validate_shape(const Shape& shape)
{
    if (const auto* r = std::get_if<Rect>(&shape)) {
        if (!in_unit_square({r->x0, r->y0}) || !in_unit_square({r->x1, r->y1}) || r->x0 > r->x1 ||
            r->y0 > r->y1)
            throw InvalidArgument("rectangle lies outside the unit square or is inverted");
        return;
    }
    const auto& line = std::get<Polyline>(shape);
    if (line.points.empty() || line.width <= 0)
        throw InvalidArgument("polyline needs at least one point and a positive width");
    for (const auto& p : line.points)
        if (!in_unit_square(p))
            throw InvalidArgument("polyline vertex (" + std::to_string(p.x) + ", " +
                                  std::to_string(p.y) + ") lies outside the unit square");
}

void paint(std::vector<double>& values, int n_side, const std::vector<Shape>& shapes, double value)
{
    const double h = 1.0 / n_side;
    for (const auto& shape : shapes) {
        validate_shape(shape);
        for (int cy = 0; cy < n_side; ++cy)
            for (int cx = 0; cx < n_side; ++cx)
                if (cell_in_shape(shape, {(cx + 0.5) * h, (cy + 0.5) * h}))
                    values[static_cast<std::size_t>(cy) * n_side + cx] = value;
    }
}

} // namespace

CoefficientField::CoefficientField(int n_side, std::vector<double> values)
    : n_side_(n_side), values_(std::move(values))
{
    if (n_side < 1)
        throw InvalidArgument("medium resolution must be positive");
    if (values_.size() != static_cast<std::size_t>(n_side) * n_side)
        throw InvalidArgument("medium has " + std::to_string(values_.size()) + " values, expected " +
                              std::to_string(static_cast<long>(n_side) * n_side));
    kappa_min_ = std::numeric_limits<double>::infinity();
    kappa_max_ = 0.0;
    for (std::size_t c = 0; c < values_.size(); ++c) {
        const double v = values_[c];
        if (!(v > 0) || !std::isfinite(v))
            throw InvalidArgument("coefficient at cell " + std::to_string(c) +
                                  " is not a positive finite number");
        kappa_min_ = std::min(kappa_min_, v);
        kappa_max_ = std::max(kappa_max_, v);
    }
}

CoefficientField CoefficientField::scaled(double factor) const
{
    if (!(factor > 0))
        throw InvalidArgument("scale factor must be positive");
    auto v = values_;
    for (auto& x : v)
        x *= factor;
    return {n_side_, std::move(v)};
}

CoefficientField constant_medium(int n_side, double value)
{
    return {n_side, std::vector<double>(static_cast<std::size_t>(n_side) * n_side, value)};
}

CoefficientField load_medium(const std::filesystem::path& path, int n_side)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open medium file '" + path.string() + "'", 0);

    std::string line;
    int line_no = 0;
    // Header: first non-blank line.
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos)
            break;
    }
    std::istringstream header(line);
    long nx = 0, ny = 0;
    std::string extra;
    if (!(header >> nx >> ny) || (header >> extra))
        throw ParseError("malformed header, expected \"nx ny\"", line_no);
    if (nx != ny)
        throw ParseError("medium must be square, got " + std::to_string(nx) + "x" +
                             std::to_string(ny),
                         line_no);
    if (nx != n_side)
        throw ParseError("medium resolution " + std::to_string(nx) + " does not match expected " +
                             std::to_string(n_side),
                         line_no);

    const std::size_t expected = static_cast<std::size_t>(nx) * ny;
    std::vector<double> values;
    values.reserve(expected);
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream row(line);
        std::string token;
        while (row >> token) {
            double v = 0.0;
            std::size_t used = 0;
            try {
                v = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size())
                throw ParseError("not a number: '" + token + "'", line_no);
            if (!(v > 0) || !std::isfinite(v))
                throw ParseError("coefficient must be positive, got " + token, line_no);
            if (values.size() == expected)
                throw ParseError("more than " + std::to_string(expected) + " values", line_no);
            values.push_back(v);
        }
    }
    if (values.size() != expected)
        throw ParseError("expected " + std::to_string(expected) + " values, found " +
                             std::to_string(values.size()),
                         line_no);
    return {n_side, std::move(values)};
}

void save_medium(const std::filesystem::path& path, const CoefficientField& field)
{
    std::ofstream out(path);
    if (!out)
        throw InvalidArgument("cannot write medium file '" + path.string() + "'");
    const int n = field.n_side();
    out << n << ' ' << n << '\n' << std::setprecision(17);
    for (int cy = 0; cy < n; ++cy) {
        for (int cx = 0; cx < n; ++cx)
            out << (cx ? " " : "") << field.cell(cy * n + cx);
        out << '\n';
    }
}

bool cell_in_shape(const Shape& shape, Point c)
{
    if (const auto* r = std::get_if<Rect>(&shape))
        return c.x >= r->x0 && c.x <= r->x1 && c.y >= r->y0 && c.y <= r->y1;
    const auto& line = std::get<Polyline>(shape);
    const double half = 0.5 * line.width;
    if (line.points.size() == 1)
        return std::hypot(c.x - line.points[0].x, c.y - line.points[0].y) <= half;
    for (std::size_t k = 0; k + 1 < line.points.size(); ++k)
        if (segment_distance(c, line.points[k], line.points[k + 1]) <= half)
            return true;
    return false;
}

std::vector<Shape> expand_shapes(const ChannelSpec& spec)
{
    std::vector<Shape> shapes = spec.shapes;
    std::mt19937_64 rng(spec.seed);
    for (int k = 0; k < spec.random_channels; ++k) {
        // Two of every three channels run roughly horizontally.
        const bool horizontal = (k % 3) != 2;
        const double across = uniform(rng, 0.08, 0.92);
        const double bend = uniform(rng, -0.08, 0.08);
        const double start = uniform(rng, 0.02, 0.12);
        const double stop = uniform(rng, 0.88, 0.98);
        const double width = uniform(rng, 0.02, 0.035);
        const double mid = std::clamp(across + bend, 0.02, 0.98);
        Polyline line;
        line.width = width;
        if (horizontal)
            line.points = {{start, across}, {0.5, mid}, {stop, across}};
        else
            line.points = {{across, start}, {mid, 0.5}, {across, stop}};
        shapes.emplace_back(std::move(line));
    }
    for (int k = 0; k < spec.random_inclusions; ++k) {
        const double w = uniform(rng, 0.02, 0.06);
        const double hgt = uniform(rng, 0.02, 0.06);
        const double x0 = uniform(rng, 0.05, 0.95 - w);
        const double y0 = uniform(rng, 0.05, 0.95 - hgt);
        shapes.emplace_back(Rect{x0, y0, x0 + w, y0 + hgt});
    }
    return shapes;
}

CoefficientField generate_channel_medium(int n_side, double background, double channel,
                                         const ChannelSpec& spec)
{
    if (n_side < 1)
        throw InvalidArgument("medium resolution must be positive");
    if (!(background > 0) || !(channel > 0))
        throw InvalidArgument("background and channel values must be positive");
    std::vector<double> values(static_cast<std::size_t>(n_side) * n_side, background);
    paint(values, n_side, expand_shapes(spec), channel);
    return {n_side, std::move(values)};
}

CoefficientField generate_three_continuum_medium(int n_side, const ThreeContinuumSpec& spec)
{
    if (n_side < 1)
        throw InvalidArgument("medium resolution must be positive");
    if (!(spec.background_lo > 0) || !(spec.background_hi > spec.background_lo) ||
        !(spec.mid > 0) || !(spec.high > 0))
        throw InvalidArgument("three-continuum values must be positive with lo < hi");
    std::mt19937_64 rng(spec.seed);
    std::vector<double> values(static_cast<std::size_t>(n_side) * n_side);
    for (auto& v : values)
        v = uniform_open(rng, spec.background_lo, spec.background_hi);
    paint(values, n_side, spec.mid_shapes, spec.mid);
    paint(values, n_side, spec.high_shapes, spec.high);
    return {n_side, std::move(values)};
}

ChannelSpec channelized_layout(std::uint64_t seed)
{
    ChannelSpec spec;
    spec.random_channels = 6;
    spec.random_inclusions = 12;
    spec.seed = seed;
    return spec;
}

CoefficientField channelized_medium(int n_side, double contrast, std::uint64_t seed)
{
    return generate_channel_medium(n_side, 1.0, contrast, channelized_layout(seed));
}

ThreeContinuumSpec three_continuum_layout(std::uint64_t seed)
{
    ChannelSpec channels;
    channels.random_channels = 4;
    channels.seed = seed;
    ChannelSpec inclusions;
    inclusions.random_inclusions = 12;
    inclusions.seed = seed + 1;

    ThreeContinuumSpec spec;
    spec.mid_shapes = expand_shapes(channels);
    spec.high_shapes = expand_shapes(inclusions);
    spec.seed = seed;
    return spec;
}

ContrastBins::ContrastBins(std::vector<Bin> bins) : bins_(std::move(bins))
{
    if (bins_.empty())
        throw InvalidArgument("at least one contrast bin is required");
    for (std::size_t k = 0; k < bins_.size(); ++k) {
        if (!(bins_[k].lo <= bins_[k].hi))
            throw InvalidArgument("bin " + std::to_string(k) + " has lo > hi");
        if (k > 0 && !(bins_[k - 1].hi < bins_[k].lo))
            throw InvalidArgument("bins " + std::to_string(k - 1) + " and " + std::to_string(k) +
                                  " overlap or are out of order");
    }
}

std::optional<int> ContrastBins::find(double value) const
{
    for (std::size_t k = 0; k < bins_.size(); ++k)
        if (bins_[k].contains(value))
            return static_cast<int>(k);
    return std::nullopt;
}

RegionMap::RegionMap(std::vector<Region> regions, int num_blocks, int num_triangles)
    : regions_(std::move(regions)), offsets_(static_cast<std::size_t>(num_blocks) + 1, 0),
      triangle_region_(static_cast<std::size_t>(num_triangles), -1)
{
    for (std::size_t g = 0; g < regions_.size(); ++g) {
        const auto& r = regions_[g];
        if (r.block < 0 || r.block >= num_blocks)
            throw InvalidArgument("region references missing block");
        if (g > 0 && r.block < regions_[g - 1].block)
            throw InvalidArgument("regions must be ordered block-major");
        ++offsets_[r.block + 1];
        for (int t : r.triangles)
            triangle_region_.at(t) = static_cast<int>(g);
        contrast_ratio_ = std::max(contrast_ratio_, r.contrast_ratio());
    }
    for (int b = 0; b < num_blocks; ++b)
        offsets_[b + 1] += offsets_[b];
}

int RegionMap::global_index(int block, int local) const
{
    if (block < 0 || block >= num_blocks() || local < 0 || local >= num_regions(block))
        throw InvalidArgument("no region (" + std::to_string(block) + ", " + std::to_string(local) +
                              ")");
    return offsets_[block] + local;
}

namespace {

/// Triangles sharing an edge with `t` on an n x n structured mesh.
int edge_neighbours(int t, int n, std::array<int, 3>& out)
{
    const int c = t / 2, cx = c % n, cy = c / n;
    int k = 0;
    if (t % 2 == 0) {
        out[k++] = t + 1;
        if (cy > 0)
            out[k++] = 2 * ((cy - 1) * n + cx) + 1;
        if (cx + 1 < n)
            out[k++] = 2 * (cy * n + cx + 1) + 1;
    } else {
        out[k++] = t - 1;
        if (cy + 1 < n)
            out[k++] = 2 * ((cy + 1) * n + cx);
        if (cx > 0)
            out[k++] = 2 * (cy * n + cx - 1);
    }
    return k;
}

} // namespace

RegionMap decompose_regions(const CoefficientField& field, const CoarseGrid& coarse,
                            const ContrastBins& bins, bool split_components)
{
    if (field.n_side() != coarse.fine_n_side())
        throw InvalidArgument("medium resolution " + std::to_string(field.n_side()) +
                              " does not match mesh resolution " +
                              std::to_string(coarse.fine_n_side()));

    const int n = coarse.fine_n_side();
    const double tri_area = coarse.triangle_area();
    std::vector<int> tri_bin(static_cast<std::size_t>(2) * n * n);
    for (std::size_t t = 0; t < tri_bin.size(); ++t) {
        const double v = field.at_triangle(static_cast<int>(t));
        const auto b = bins.find(v);
        if (!b) {
            std::ostringstream msg;
            msg << "coefficient value " << std::setprecision(17) << v
                << " is not covered by any contrast bin";
            throw ClassificationError(msg.str(), v);
        }
        tri_bin[t] = *b;
    }

    auto make_region = [&](int block, int bin, std::vector<int> tris) {
        Region r;
        r.block = block;
        r.bin = bin;
        std::sort(tris.begin(), tris.end());
        r.triangles = std::move(tris);
        r.area = tri_area * static_cast<double>(r.triangles.size());
        r.kappa_min = std::numeric_limits<double>::infinity();
        r.kappa_max = 0;
        for (int t : r.triangles) {
            r.kappa_min = std::min(r.kappa_min, field.at_triangle(t));
            r.kappa_max = std::max(r.kappa_max, field.at_triangle(t));
        }
        return r;
    };

    std::vector<Region> regions;
    std::vector<int> in_block(tri_bin.size(), -1);
    std::vector<char> seen(tri_bin.size(), 0);
    for (int b = 0; b < coarse.num_blocks(); ++b) {
        const auto& tris = coarse.block_triangles(b);
        std::map<int, std::vector<int>> by_bin;
        for (int t : tris) {
            by_bin[tri_bin[t]].push_back(t);
            in_block[t] = b;
        }
        std::vector<Region> block_regions;
        for (auto& [bin, members] : by_bin) {
            if (!split_components) {
                block_regions.push_back(make_region(b, bin, std::move(members)));
                continue;
            }
            // members are sorted, so components come out ordered by smallest triangle.
            for (int seed_t : members) {
                if (seen[seed_t])
                    continue;
                std::vector<int> component{seed_t}, stack{seed_t};
                seen[seed_t] = 1;
                while (!stack.empty()) {
                    const int t = stack.back();
                    stack.pop_back();
                    std::array<int, 3> nb{};
                    const int count = edge_neighbours(t, n, nb);
                    for (int k = 0; k < count; ++k) {
                        const int s = nb[k];
                        if (!seen[s] && in_block[s] == b && tri_bin[s] == bin) {
                            seen[s] = 1;
                            component.push_back(s);
                            stack.push_back(s);
                        }
                    }
                }
                block_regions.push_back(make_region(b, bin, std::move(component)));
            }
        }
        for (std::size_t j = 0; j < block_regions.size(); ++j) {
            block_regions[j].local = static_cast<int>(j);
            regions.push_back(std::move(block_regions[j]));
        }
    }
    return RegionMap(std::move(regions), coarse.num_blocks(), static_cast<int>(tri_bin.size()));
}

} // namespace nlmc
