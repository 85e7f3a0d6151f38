#include "nlmc/fem.hpp"

#include "nlmc/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace nlmc {

ElementMatrix element_stiffness(const std::array<Point, 3>& v)
{
    const double det = (v[1].x - v[0].x) * (v[2].y - v[0].y) - (v[2].x - v[0].x) * (v[1].y - v[0].y);
    if (det == 0.0)
        throw InvalidArgument("degenerate triangle");
    const double area = 0.5 * std::abs(det);
    // grad(phi_a) = (y_b - y_c, x_c - x_b) / det for (a, b, c) cyclic.
    std::array<Point, 3> g;
    for (int a = 0; a < 3; ++a) {
        const auto& pb = v[(a + 1) % 3];
        const auto& pc = v[(a + 2) % 3];
        g[a] = {(pb.y - pc.y) / det, (pc.x - pb.x) / det};
    }
    ElementMatrix k{};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            k[a][b] = area * (g[a].x * g[b].x + g[a].y * g[b].y);
    return k;
}

DofMap DofMap::from_nodes(const std::vector<int>& free_nodes, int num_nodes)
{
    DofMap m;
    m.dof_to_node = free_nodes;
    m.node_to_dof.assign(static_cast<std::size_t>(num_nodes), -1);
    for (std::size_t d = 0; d < free_nodes.size(); ++d) {
        if (d > 0 && free_nodes[d] <= free_nodes[d - 1])
            throw InvalidArgument("free nodes must be sorted and unique");
        m.node_to_dof.at(free_nodes[d]) = static_cast<int>(d);
    }
    return m;
}

std::vector<double> DofMap::to_nodes(std::span<const double> dofs, int num_nodes) const
{
    if (dofs.size() != dof_to_node.size())
        throw InvalidArgument("dof vector size mismatch");
    std::vector<double> nodal(static_cast<std::size_t>(num_nodes), 0.0);
    for (std::size_t d = 0; d < dofs.size(); ++d)
        nodal[dof_to_node[d]] = dofs[d];
    return nodal;
}

std::vector<double> DofMap::from_nodes(std::span<const double> nodal) const
{
    if (nodal.size() != node_to_dof.size())
        throw InvalidArgument("nodal vector size mismatch");
    std::vector<double> dofs(dof_to_node.size());
    for (std::size_t d = 0; d < dofs.size(); ++d)
        dofs[d] = nodal[dof_to_node[d]];
    return dofs;
}

namespace {

void check_resolution(const FineMesh& mesh, const CoefficientField& field)
{
    if (mesh.n_side() != field.n_side())
        throw InvalidArgument("medium resolution " + std::to_string(field.n_side()) +
                              " does not match mesh resolution " + std::to_string(mesh.n_side()));
}

/// Every triangle of a structured mesh has the same two shapes; cache their element matrices.
std::array<ElementMatrix, 2> reference_elements(const FineMesh& mesh)
{
    return {element_stiffness(mesh.triangle_points(0)), element_stiffness(mesh.triangle_points(1))};
}

} // namespace

SparseMatrix assemble_full_stiffness(const FineMesh& mesh, const CoefficientField& field)
{
    check_resolution(mesh, field);
    const auto ref = reference_elements(mesh);
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 9);
    for (int e = 0; e < mesh.num_triangles(); ++e) {
        const auto& tri = mesh.triangles()[e];
        const auto& k = ref[e % 2];
        const double kappa = field.at_triangle(e);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                t.push_back({tri[a], tri[b], kappa * k[a][b]});
    }
    return SparseMatrix::from_triplets(mesh.num_nodes(), mesh.num_nodes(), t);
}

StiffnessOperator assemble_stiffness(const FineMesh& mesh, const CoefficientField& field,
                                     const OversampledRegion* domain)
{
    check_resolution(mesh, field);
    StiffnessOperator op;
    std::vector<int> all_triangles;
    const std::vector<int>* triangles = nullptr;
    if (domain) {
        op.dofs = DofMap::from_nodes(domain->interior_nodes, mesh.num_nodes());
        triangles = &domain->triangles;
    } else {
        std::vector<int> free;
        for (int p = 0; p < mesh.num_nodes(); ++p)
            if (!mesh.is_boundary_node(p))
                free.push_back(p);
        op.dofs = DofMap::from_nodes(free, mesh.num_nodes());
        all_triangles.resize(static_cast<std::size_t>(mesh.num_triangles()));
        for (int e = 0; e < mesh.num_triangles(); ++e)
            all_triangles[e] = e;
        triangles = &all_triangles;
    }

    const auto ref = reference_elements(mesh);
    std::vector<Triplet> t;
    t.reserve(triangles->size() * 9);
    for (int e : *triangles) {
        const auto& tri = mesh.triangles()[e];
        const auto& k = ref[e % 2];
        const double kappa = field.at_triangle(e);
        for (int a = 0; a < 3; ++a) {
            const int da = op.dofs.node_to_dof[tri[a]];
            if (da < 0)
                continue;
            for (int b = 0; b < 3; ++b) {
                const int db = op.dofs.node_to_dof[tri[b]];
                if (db >= 0)
                    t.push_back({da, db, kappa * k[a][b]});
            }
        }
    }
    op.a = SparseMatrix::from_triplets(op.dofs.size(), op.dofs.size(), t);
    return op;
}

namespace {

/// Clip a convex polygon against the half-plane sign * (coord - bound) <= 0.
std::vector<Point> clip(const std::vector<Point>& poly, bool use_x, double bound, double sign)
{
    std::vector<Point> out;
    const auto inside = [&](Point p) { return sign * ((use_x ? p.x : p.y) - bound) <= 0; };
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const Point a = poly[k];
        const Point b = poly[(k + 1) % poly.size()];
        const bool ia = inside(a), ib = inside(b);
        if (ia)
            out.push_back(a);
        if (ia != ib) {
            const double ca = use_x ? a.x : a.y;
            const double cb = use_x ? b.x : b.y;
            const double s = (bound - ca) / (cb - ca);
            out.push_back({a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)});
        }
    }
    return out;
}

/// Area and centroid of a simple polygon.
std::pair<double, Point> area_centroid(const std::vector<Point>& poly)
{
    double a2 = 0, cx = 0, cy = 0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const Point p = poly[k];
        const Point q = poly[(k + 1) % poly.size()];
        const double cr = p.x * q.y - q.x * p.y;
        a2 += cr;
        cx += (p.x + q.x) * cr;
        cy += (p.y + q.y) * cr;
    }
    if (a2 == 0)
        return {0.0, {}};
    return {0.5 * std::abs(a2), {cx / (3 * a2), cy / (3 * a2)}};
}

std::array<double, 3> barycentric(const std::array<Point, 3>& v, Point p)
{
    const double det = (v[1].x - v[0].x) * (v[2].y - v[0].y) - (v[2].x - v[0].x) * (v[1].y - v[0].y);
    const double l1 = ((p.x - v[0].x) * (v[2].y - v[0].y) - (v[2].x - v[0].x) * (p.y - v[0].y)) / det;
    const double l2 = ((v[1].x - v[0].x) * (p.y - v[0].y) - (p.x - v[0].x) * (v[1].y - v[0].y)) / det;
    return {1.0 - l1 - l2, l1, l2};
}

} // namespace

std::vector<double> assemble_load(const FineMesh& mesh, const SourceTerm& source)
{
    std::vector<double> b(static_cast<std::size_t>(mesh.num_nodes()), 0.0);
    if (const auto* c = std::get_if<ConstantSource>(&source)) {
        if (c->value == 0.0)
            return b;
        for (int e = 0; e < mesh.num_triangles(); ++e) {
            const double share = c->value * mesh.cell_area()[e] / 3.0;
            for (int p : mesh.triangles()[e])
                b[p] += share;
        }
        return b;
    }
    const auto& ind = std::get<IndicatorSource>(source);
    if (ind.value == 0.0)
        return b;
    if (ind.x0 > ind.x1 || ind.y0 > ind.y1)
        throw InvalidArgument("indicator source rectangle is inverted");
    for (int e = 0; e < mesh.num_triangles(); ++e) {
        const auto v = mesh.triangle_points(e);
        std::vector<Point> poly(v.begin(), v.end());
        poly = clip(poly, true, ind.x1, 1.0);
        if (!poly.empty()) poly = clip(poly, true, ind.x0, -1.0);
        if (!poly.empty()) poly = clip(poly, false, ind.y1, 1.0);
        if (!poly.empty()) poly = clip(poly, false, ind.y0, -1.0);
        if (poly.size() < 3)
            continue;
        const auto [area, centroid] = area_centroid(poly);
        if (area == 0.0)
            continue;
        // Linear integrand: exact by area times value at the centroid.
        const auto lam = barycentric(v, centroid);
        const auto& tri = mesh.triangles()[e];
        for (int a = 0; a < 3; ++a)
            b[tri[a]] += ind.value * area * lam[a];
    }
    return b;
}

FineOperator assemble_fine_operator(const FineMesh& mesh, const CoefficientField& field,
                                    const SourceTerm& source)
{
    auto stiff = assemble_stiffness(mesh, field, nullptr);
    FineOperator op;
    op.a = std::move(stiff.a);
    op.dofs = std::move(stiff.dofs);
    op.b = op.dofs.from_nodes(assemble_load(mesh, source));
    return op;
}

FineSolution solve_fine(const FineOperator& op, int num_nodes, double tol)
{
    const auto x = solve_spd(op.a, op.b, tol);
    FineSolution s;
    s.values = op.dofs.to_nodes(x, num_nodes);
    s.energy = dot(x, op.a.multiply(x));
    return s;
}

RegionMoments assemble_region_moments(const FineMesh& mesh, const RegionMap& regions,
                                      const OversampledRegion& domain, const DofMap& dofs)
{
    RegionMoments out;
    std::vector<Triplet> t;
    int row = 0;
    for (int blk : domain.blocks_in) {
        if (blk >= regions.num_blocks())
            throw InvalidArgument("block " + std::to_string(blk) + " has no regions");
        for (int j = 0; j < regions.num_regions(blk); ++j, ++row) {
            const auto& reg = regions.region(blk, j);
            bool any = false;
            for (int e : reg.triangles) {
                const double share = mesh.cell_area()[e] / 3.0;
                for (int p : mesh.triangles()[e]) {
                    const int d = dofs.node_to_dof[p];
                    if (d >= 0) {
                        t.push_back({row, d, share});
                        any = true;
                    }
                }
            }
            if (!any)
                throw ConstraintDegeneracyError("region (" + std::to_string(blk) + ", " +
                                                    std::to_string(j) +
                                                    ") touches no free dof of the domain",
                                                row);
            out.region_ids.push_back(regions.global_index(blk, j));
            out.areas.push_back(reg.area);
        }
    }
    out.matrix = SparseMatrix::from_triplets(row, dofs.size(), t);
    return out;
}

std::vector<double> triangle_energies(const FineMesh& mesh, const CoefficientField& field,
                                      std::span<const double> nodal)
{
    check_resolution(mesh, field);
    if (nodal.size() != static_cast<std::size_t>(mesh.num_nodes()))
        throw InvalidArgument("nodal vector size mismatch");
    const auto ref = reference_elements(mesh);
    std::vector<double> e(static_cast<std::size_t>(mesh.num_triangles()));
    for (int k = 0; k < mesh.num_triangles(); ++k) {
        const auto& tri = mesh.triangles()[k];
        const auto& m = ref[k % 2];
        double s = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                s += nodal[tri[a]] * m[a][b] * nodal[tri[b]];
        e[k] = field.at_triangle(k) * s;
    }
    return e;
}

void write_field_dump(const std::filesystem::path& path, const FineMesh& mesh,
                      std::span<const double> nodal)
{
    if (nodal.size() != static_cast<std::size_t>(mesh.num_nodes()))
        throw InvalidArgument("nodal vector size mismatch");
    std::ofstream out(path);
    if (!out)
        throw InvalidArgument("cannot write '" + path.string() + "'");
    const int np = mesh.n_side() + 1;
    out << np << ' ' << np << '\n' << std::setprecision(17);
    for (int iy = 0; iy < np; ++iy) {
        for (int ix = 0; ix < np; ++ix)
            out << (ix ? " " : "") << nodal[mesh.node_index(ix, iy)];
        out << '\n';
    }
}

std::vector<double> read_field_dump(const std::filesystem::path& path, int n_side)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path.string() + "'", 0);
    // Leading '#' lines carry metadata (basis dumps).
    while (in >> std::ws && in.peek() == '#') {
        std::string skip;
        std::getline(in, skip);
    }
    long nx = 0, ny = 0;
    if (!(in >> nx >> ny) || nx != n_side + 1 || ny != n_side + 1)
        throw ParseError("field dump header does not match " + std::to_string(n_side + 1) +
                             " nodes per side",
                         1);
    std::vector<double> v(static_cast<std::size_t>(nx * ny));
    for (auto& x : v)
        if (!(in >> x))
            throw ParseError("field dump truncated", 0);
    return v;
}

} // namespace nlmc
