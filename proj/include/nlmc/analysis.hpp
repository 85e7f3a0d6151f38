#pragma once

#include "nlmc/basis.hpp"
#include "nlmc/grid.hpp"
#include "nlmc/medium.hpp"
#include "nlmc/sparse.hpp"

#include <span>
#include <vector>

namespace nlmc {

/// Exact P1 block means: sum over triangles of |tau| * (vertex mean) / |K|.
std::vector<double> coarse_cell_averages(std::span<const double> nodal, const FineMesh& mesh,
                                         const CoarseGrid& coarse);

/// pi_ij of a nodal vector for every region, in region-map order.
std::vector<double> region_averages(std::span<const double> nodal, const FineMesh& mesh,
                                    const RegionMap& regions);

/// Area-weighted block means from per-region means.
std::vector<double> block_averages_from_regions(std::span<const double> region_values,
                                                const RegionMap& regions,
                                                const CoarseGrid& coarse);

struct RelativeL2 {
    double value = 0.0;    ///< sqrt of the ratio
    double squared = 0.0;  ///< the ratio itself
};

/// sqrt(sum |K| (f_K - m_K)^2 / sum |K| f_K^2).
RelativeL2 relative_L2_error(std::span<const double> ubar_f, std::span<const double> ubar_ms,
                             std::span<const double> areas);

/// sqrt(d^T A d / u_f^T A u_f) with d = u_f - u_ms.
double energy_error(std::span<const double> u_f, std::span<const double> u_ms,
                    const SparseMatrix& a);

/// ||u||_{L2} of a P1 nodal field, integrated exactly.
double l2_norm(const FineMesh& mesh, std::span<const double> nodal);

struct DecayPoint {
    int ring = 0;
    double fraction = 0.0;  ///< share of a(psi,psi) outside K_{i,ring}
};

/// Rings 0..layers (0..N-1 for a global basis).
std::vector<DecayPoint> basis_decay_profile(const BasisFunction& psi, const FineMesh& mesh,
                                            const CoefficientField& field,
                                            const CoarseGrid& coarse);

} // namespace nlmc
