#include "nlmc/analysis.hpp"

#include "nlmc/errors.hpp"
#include "nlmc/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace nlmc {

std::vector<double> coarse_cell_averages(std::span<const double> nodal, const FineMesh& mesh,
                                         const CoarseGrid& coarse)
{
    if (nodal.size() != static_cast<std::size_t>(mesh.num_nodes()))
        throw InvalidArgument("nodal vector size mismatch");
    if (coarse.fine_n_side() != mesh.n_side())
        throw InvalidArgument("coarse grid belongs to a different mesh");
    std::vector<double> avg(static_cast<std::size_t>(coarse.num_blocks()), 0.0);
    for (int b = 0; b < coarse.num_blocks(); ++b) {
        double s = 0.0, area = 0.0;
        for (int e : coarse.block_triangles(b)) {
            const auto& tri = mesh.triangles()[e];
            s += mesh.cell_area()[e] * (nodal[tri[0]] + nodal[tri[1]] + nodal[tri[2]]) / 3.0;
            area += mesh.cell_area()[e];
        }
        avg[b] = s / area;
    }
    return avg;
}

std::vector<double> region_averages(std::span<const double> nodal, const FineMesh& mesh,
                                    const RegionMap& regions)
{
    if (nodal.size() != static_cast<std::size_t>(mesh.num_nodes()))
        throw InvalidArgument("nodal vector size mismatch");
    std::vector<double> out(static_cast<std::size_t>(regions.total_regions()));
    for (int g = 0; g < regions.total_regions(); ++g)
        out[g] = region_mean(mesh, regions, g, nodal);
    return out;
}

std::vector<double> block_averages_from_regions(std::span<const double> region_values,
                                                const RegionMap& regions,
                                                const CoarseGrid& coarse)
{
    if (region_values.size() != static_cast<std::size_t>(regions.total_regions()))
        throw InvalidArgument("one value per region expected");
    std::vector<double> out(static_cast<std::size_t>(coarse.num_blocks()), 0.0);
    for (int b = 0; b < coarse.num_blocks(); ++b) {
        double s = 0.0, area = 0.0;
        for (int j = 0; j < regions.num_regions(b); ++j) {
            const auto& reg = regions.region(b, j);
            s += reg.area * region_values[regions.global_index(b, j)];
            area += reg.area;
        }
        out[b] = s / area;
    }
    return out;
}

RelativeL2 relative_L2_error(std::span<const double> ubar_f, std::span<const double> ubar_ms,
                             std::span<const double> areas)
{
    if (ubar_f.size() != ubar_ms.size() || ubar_f.size() != areas.size())
        throw InvalidArgument("relative L2 error needs matching block sets");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < areas.size(); ++k) {
        const double d = ubar_f[k] - ubar_ms[k];
        num += areas[k] * d * d;
        den += areas[k] * ubar_f[k] * ubar_f[k];
    }
    if (den == 0.0)
        throw UndefinedMetricError("relative L2 error undefined: reference averages are all zero");
    RelativeL2 e;
    e.squared = num / den;
    e.value = std::sqrt(e.squared);
    return e;
}

double energy_error(std::span<const double> u_f, std::span<const double> u_ms,
                    const SparseMatrix& a)
{
    if (u_f.size() != u_ms.size() || u_f.size() != static_cast<std::size_t>(a.rows()))
        throw InvalidArgument("energy error size mismatch");
    std::vector<double> d(u_f.size());
    for (std::size_t k = 0; k < d.size(); ++k)
        d[k] = u_f[k] - u_ms[k];
    const double den = dot(u_f, a.multiply(u_f));
    if (!(den > 0.0))
        throw UndefinedMetricError("energy error undefined: reference has zero energy");
    return std::sqrt(std::max(0.0, dot(d, a.multiply(d))) / den);
}

double l2_norm(const FineMesh& mesh, std::span<const double> nodal)
{
    if (nodal.size() != static_cast<std::size_t>(mesh.num_nodes()))
        throw InvalidArgument("nodal vector size mismatch");
    // P1 mass matrix |tau|/12 * [2 1 1; 1 2 1; 1 1 2].
    double s = 0.0;
    for (int e = 0; e < mesh.num_triangles(); ++e) {
        const auto& tri = mesh.triangles()[e];
        const double a = nodal[tri[0]], b = nodal[tri[1]], c = nodal[tri[2]];
        s += mesh.cell_area()[e] / 12.0 *
             (2 * (a * a + b * b + c * c) + 2 * (a * b + b * c + a * c));
    }
    return std::sqrt(s);
}

std::vector<DecayPoint> basis_decay_profile(const BasisFunction& psi, const FineMesh& mesh,
                                            const CoefficientField& field,
                                            const CoarseGrid& coarse)
{
    const auto nodal = psi.nodal(mesh.num_nodes());
    const auto energies = triangle_energies(mesh, field, nodal);

    const int max_ring = psi.is_global() ? coarse.n_side() - 1 : psi.layers;
    const auto [ox, oy] = coarse.block_coords(psi.block);
    // Energy per Chebyshev ring distance from the owner block.
    std::vector<double> ring_energy(static_cast<std::size_t>(coarse.n_side()), 0.0);
    double total = 0.0;
    for (int e = 0; e < mesh.num_triangles(); ++e) {
        const auto [bx, by] = coarse.block_coords(coarse.block_of_triangle(e));
        const int dist = std::max(std::abs(bx - ox), std::abs(by - oy));
        ring_energy[dist] += energies[e];
        total += energies[e];
    }
    std::vector<DecayPoint> profile;
    for (int r = 0; r <= max_ring; ++r) {
        double outside = 0.0;
        for (std::size_t d = static_cast<std::size_t>(r) + 1; d < ring_energy.size(); ++d)
            outside += ring_energy[d];
        profile.push_back({r, total > 0 ? outside / total : 0.0});
    }
    return profile;
}

} // namespace nlmc
