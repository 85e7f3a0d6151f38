#pragma once

#include "nlmc/grid.hpp"
#include "nlmc/medium.hpp"
#include "nlmc/solvers.hpp"
#include "nlmc/sparse.hpp"

#include <array>
#include <variant>
#include <vector>

namespace nlmc {

using ElementMatrix = std::array<std::array<double, 3>, 3>;

/// P1 stiffness of one triangle with unit coefficient: int grad(phi_a) . grad(phi_b).
ElementMatrix element_stiffness(const std::array<Point, 3>& vertices);

/// Free (non-Dirichlet) nodes of a domain, numbered in increasing node order.
struct DofMap {
    std::vector<int> dof_to_node;
    std::vector<int> node_to_dof;  ///< -1 on Dirichlet or outside nodes

    int size() const noexcept { return static_cast<int>(dof_to_node.size()); }
    static DofMap from_nodes(const std::vector<int>& free_nodes, int num_nodes);
    /// Dof vector scattered to a full nodal vector, zero elsewhere.
    std::vector<double> to_nodes(std::span<const double> dofs, int num_nodes) const;
    std::vector<double> from_nodes(std::span<const double> nodal) const;
};

/// Unconstrained stiffness over all mesh nodes; row sums vanish.
SparseMatrix assemble_full_stiffness(const FineMesh& mesh, const CoefficientField& field);

struct StiffnessOperator {
    SparseMatrix a;
    DofMap dofs;
};

/// Stiffness on H^1_0 of the domain (the whole square when `domain` is null),
/// Dirichlet dofs eliminated.
StiffnessOperator assemble_stiffness(const FineMesh& mesh, const CoefficientField& field,
                                     const OversampledRegion* domain = nullptr);

struct ConstantSource {
    double value = 1.0;
    bool operator==(const ConstantSource&) const = default;
};

/// f = value on [x0,x1] x [y0,y1], zero elsewhere.
struct IndicatorSource {
    double x0 = 0, y0 = 0, x1 = 0.1, y1 = 0.1;
    double value = 1.0;
    bool operator==(const IndicatorSource&) const = default;
};

using SourceTerm = std::variant<ConstantSource, IndicatorSource>;

/// Nodal load b_p = int f phi_p over all mesh nodes, integrated exactly for
/// piecewise-constant f (indicator rectangles clipped against each triangle).
std::vector<double> assemble_load(const FineMesh& mesh, const SourceTerm& source);

/// Global fine operator: stiffness and load on interior dofs.
struct FineOperator {
    SparseMatrix a;
    std::vector<double> b;
    DofMap dofs;
};

FineOperator assemble_fine_operator(const FineMesh& mesh, const CoefficientField& field,
                                    const SourceTerm& source);

struct FineSolution {
    std::vector<double> values;  ///< every mesh node, zero on the boundary
    double energy = 0.0;         ///< u^T A u
};

FineSolution solve_fine(const FineOperator& op, int num_nodes, double tol = default_tolerance);

/// Constraint block for an oversampled domain: one row per region inside it.
struct RegionMoments {
    SparseMatrix matrix;           ///< row k: int_{region} phi_p over the domain's free dofs
    std::vector<int> region_ids;   ///< global region index of each row
    std::vector<double> areas;     ///< |region| of each row
};

/// Regions are taken block by block in `domain.blocks_in` order.
RegionMoments assemble_region_moments(const FineMesh& mesh, const RegionMap& regions,
                                      const OversampledRegion& domain, const DofMap& dofs);

/// Per-triangle energies kappa * grad(u).grad(u) * |tau| of a nodal vector.
std::vector<double> triangle_energies(const FineMesh& mesh, const CoefficientField& field,
                                      std::span<const double> nodal);

/// Field dump: "nx ny" header (node counts per side) then nodal values row-major.
/// Leading lines starting with # are skipped on read.
void write_field_dump(const std::filesystem::path& path, const FineMesh& mesh,
                      std::span<const double> nodal);
std::vector<double> read_field_dump(const std::filesystem::path& path, int n_side);

} // namespace nlmc
