#pragma once

#include "nlmc/fem.hpp"
#include "nlmc/grid.hpp"
#include "nlmc/medium.hpp"
#include "nlmc/solvers.hpp"

#include <span>
#include <vector>

namespace nlmc {

inline constexpr int global_layers = -1;

/// One NLMC basis function: the energy minimizer over H^1_0 of its oversampled
/// domain with mean one on its own region and mean zero on every other region
/// inside the domain.
struct BasisFunction {
    int block = 0;
    int region = 0;                  ///< local index j within the block
    int layers = 0;                  ///< global_layers for the global basis
    std::vector<int> nodes;          ///< free nodes of the domain, sorted
    std::vector<double> values;      ///< nodal values on `nodes`
    std::vector<int> constraint_regions;  ///< global region ids constrained in the domain
    std::vector<double> multipliers;      ///< lambda_l^n of the integral-form constraints
    double energy = 0.0;             ///< a(psi, psi)

    bool is_global() const noexcept { return layers == global_layers; }
    /// m = 0 gives a valid but typically poor basis.
    bool low_accuracy() const noexcept { return layers == 0; }
    std::vector<double> nodal(int num_nodes) const;
};

/// Shared inputs for basis construction. References must outlive the builder.
class BasisBuilder {
public:
    BasisBuilder(const FineMesh& mesh, const CoefficientField& field, const CoarseGrid& coarse,
                 const RegionMap& regions, double tol = default_tolerance);

    /// All bases owned by `block`, sharing one factorization. layers < 0 means the whole domain.
    std::vector<BasisFunction> build_block(int block, int layers) const;
    BasisFunction build(int block, int region, int layers) const;

    /// Every basis for a fixed layer count, ordered block-major then region.
    /// Blocks whose oversampled domains coincide share a factorization.
    std::vector<BasisFunction> build_all(int layers, int threads = 1) const;

    const FineMesh& mesh() const noexcept { return mesh_; }
    const CoefficientField& field() const noexcept { return field_; }
    const CoarseGrid& coarse() const noexcept { return coarse_; }
    const RegionMap& regions() const noexcept { return regions_; }

private:
    OversampledRegion domain_for(int block, int layers) const;
    std::vector<BasisFunction> solve_domain(const OversampledRegion& domain,
                                            std::span<const int> owners, int layers) const;

    const FineMesh& mesh_;
    const CoefficientField& field_;
    const CoarseGrid& coarse_;
    const RegionMap& regions_;
    double tol_;
};

BasisFunction build_local_basis(const FineMesh& mesh, const CoefficientField& field,
                                const CoarseGrid& coarse, const RegionMap& regions, int block,
                                int region, int layers, double tol = default_tolerance);

BasisFunction build_global_basis(const FineMesh& mesh, const CoefficientField& field,
                                 const CoarseGrid& coarse, const RegionMap& regions, int block,
                                 int region, double tol = default_tolerance);

/// Layer count from the logarithmic rule ceil(log10(kappa_max / H)) + offset, at least 1.
int auto_layers(double kappa_max, double H, int offset = 2);

/// Region mean of a nodal vector over the given global region.
double region_mean(const FineMesh& mesh, const RegionMap& regions, int global_region,
                   std::span<const double> nodal);

} // namespace nlmc
