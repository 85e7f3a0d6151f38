#include "nlmc/basis.hpp"

#include "nlmc/errors.hpp"
#include "nlmc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <tuple>

namespace nlmc {

std::vector<double> BasisFunction::nodal(int num_nodes) const
{
    std::vector<double> v(static_cast<std::size_t>(num_nodes), 0.0);
    for (std::size_t k = 0; k < nodes.size(); ++k)
        v.at(nodes[k]) = values[k];
    return v;
}

BasisBuilder::BasisBuilder(const FineMesh& mesh, const CoefficientField& field,
                           const CoarseGrid& coarse, const RegionMap& regions, double tol)
    : mesh_(mesh), field_(field), coarse_(coarse), regions_(regions), tol_(tol)
{
    if (field.n_side() != mesh.n_side() || coarse.fine_n_side() != mesh.n_side())
        throw InvalidArgument("mesh, medium and coarse grid resolutions disagree");
    if (regions.num_blocks() != coarse.num_blocks())
        throw InvalidArgument("region map was built for a different coarse grid");
}

OversampledRegion BasisBuilder::domain_for(int block, int layers) const
{
    return layers < 0 ? whole_domain(coarse_, block) : oversample(coarse_, block, layers);
}

std::vector<BasisFunction> BasisBuilder::solve_domain(const OversampledRegion& domain,
                                                      std::span<const int> owners,
                                                      int layers) const
{
    const auto op = assemble_stiffness(mesh_, field_, &domain);
    const auto moments = assemble_region_moments(mesh_, regions_, domain, op.dofs);

    // Mean-value rows: int_{K_l^n} v / |K_l^n|.
    std::vector<double> inv_area(moments.areas.size());
    for (std::size_t k = 0; k < inv_area.size(); ++k)
        inv_area[k] = 1.0 / moments.areas[k];
    const auto means = moments.matrix.scale_rows(inv_area);

    auto name_row = [&](int row) {
        const auto& reg = regions_.region(moments.region_ids.at(row));
        return "(" + std::to_string(reg.block) + ", " + std::to_string(reg.local) + ")";
    };

    std::unique_ptr<SaddleSolver> solver;
    try {
        solver = std::make_unique<SaddleSolver>(op.a, means);
    } catch (const ConstraintDegeneracyError& e) {
        throw ConstraintDegeneracyError("constraint for region " + name_row(e.row()) +
                                            " in the domain of block " +
                                            std::to_string(domain.block) + " is degenerate: " +
                                            e.what(),
                                        e.row());
    }

    const auto n = static_cast<std::size_t>(op.dofs.size());
    const auto nc = moments.region_ids.size();
    const std::vector<double> zero(n, 0.0);
    std::vector<BasisFunction> out;
    for (int owner : owners) {
        for (int j = 0; j < regions_.num_regions(owner); ++j) {
            const int gid = regions_.global_index(owner, j);
            const auto it = std::find(moments.region_ids.begin(), moments.region_ids.end(), gid);
            if (it == moments.region_ids.end())
                throw InvalidArgument("owner region outside its oversampled domain");
            std::vector<double> g(nc, 0.0);
            g[static_cast<std::size_t>(it - moments.region_ids.begin())] = 1.0;

            auto sol = solver->solve(zero, g, tol_);

            BasisFunction psi;
            psi.block = owner;
            psi.region = j;
            psi.layers = layers < 0 ? global_layers : layers;
            psi.nodes = op.dofs.dof_to_node;
            psi.energy = dot(sol.primal, op.a.multiply(sol.primal));
            psi.values = std::move(sol.primal);
            psi.constraint_regions = moments.region_ids;
            psi.multipliers.resize(nc);
            for (std::size_t k = 0; k < nc; ++k)
                psi.multipliers[k] = sol.multipliers[k] * inv_area[k];
            out.push_back(std::move(psi));
        }
    }
    return out;
}

std::vector<BasisFunction> BasisBuilder::build_block(int block, int layers) const
{
    const auto domain = domain_for(block, layers);
    const int owners[] = {block};
    return solve_domain(domain, owners, layers);
}

BasisFunction BasisBuilder::build(int block, int region, int layers) const
{
    if (region < 0 || region >= regions_.num_regions(block))
        throw InvalidArgument("no region (" + std::to_string(block) + ", " +
                              std::to_string(region) + ")");
    auto all = build_block(block, layers);
    return std::move(all.at(static_cast<std::size_t>(region)));
}

std::vector<BasisFunction> BasisBuilder::build_all(int layers, int threads) const
{
    // Group blocks by their oversampled rectangle.
    std::map<std::tuple<int, int, int, int>, std::vector<int>> groups;
    std::vector<OversampledRegion> domains;
    for (int b = 0; b < coarse_.num_blocks(); ++b) {
        auto d = domain_for(b, layers);
        auto& members = groups[{d.bx0, d.by0, d.bx1, d.by1}];
        if (members.empty())
            domains.push_back(std::move(d));
        members.push_back(b);
    }
    std::vector<std::vector<int>> owners;
    for (const auto& d : domains)
        owners.push_back(groups[{d.bx0, d.by0, d.bx1, d.by1}]);

    std::vector<std::vector<BasisFunction>> results(domains.size());
    parallel_for(static_cast<int>(domains.size()), threads,
                 [&](int g) { results[g] = solve_domain(domains[g], owners[g], layers); });

    std::vector<std::vector<BasisFunction>> per_block(static_cast<std::size_t>(coarse_.num_blocks()));
    for (auto& group : results)
        for (auto& psi : group)
            per_block[psi.block].push_back(std::move(psi));
    std::vector<BasisFunction> out;
    out.reserve(static_cast<std::size_t>(regions_.total_regions()));
    for (auto& blk : per_block)
        for (auto& psi : blk)
            out.push_back(std::move(psi));
    return out;
}

BasisFunction build_local_basis(const FineMesh& mesh, const CoefficientField& field,
                                const CoarseGrid& coarse, const RegionMap& regions, int block,
                                int region, int layers, double tol)
{
    if (layers < 0)
        throw InvalidArgument("oversampling layers must be non-negative");
    return BasisBuilder(mesh, field, coarse, regions, tol).build(block, region, layers);
}

BasisFunction build_global_basis(const FineMesh& mesh, const CoefficientField& field,
                                 const CoarseGrid& coarse, const RegionMap& regions, int block,
                                 int region, double tol)
{
    return BasisBuilder(mesh, field, coarse, regions, tol).build(block, region, global_layers);
}

int auto_layers(double kappa_max, double H, int offset)
{
    if (!(kappa_max > 0) || !(H > 0))
        throw InvalidArgument("auto layers needs positive kappa_max and H");
    const int k = static_cast<int>(std::ceil(std::log10(kappa_max / H))) + offset;
    return std::max(k, 1);
}

double region_mean(const FineMesh& mesh, const RegionMap& regions, int global_region,
                   std::span<const double> nodal)
{
    const auto& reg = regions.region(global_region);
    double s = 0.0;
    for (int e : reg.triangles) {
        const auto& tri = mesh.triangles()[e];
        s += mesh.cell_area()[e] * (nodal[tri[0]] + nodal[tri[1]] + nodal[tri[2]]) / 3.0;
    }
    return s / reg.area;
}

} // namespace nlmc
