#pragma once

#include "nlmc/basis.hpp"
#include "nlmc/fem.hpp"
#include "nlmc/sparse.hpp"

#include <span>
#include <utility>
#include <vector>

namespace nlmc {

/// R: row g is the basis of global region g, columns are the fine interior dofs.
struct ProjectionOperator {
    SparseMatrix r;
    std::vector<std::pair<int, int>> owners;  ///< (block, region) per row
};

/// Bases may come in any order; rows follow the region map's block-major order.
ProjectionOperator build_projection(std::span<const BasisFunction> bases, const RegionMap& regions,
                                    const DofMap& fine_dofs);

struct UpscaledSolution {
    std::vector<double> ubar;          ///< one value per region: its mean of the solution
    std::vector<double> u_ms;          ///< R^T ubar on the fine interior dofs
    SparseMatrix coarse_matrix;        ///< R A R^T
    std::vector<double> coarse_rhs;    ///< R b
    double min_relative_pivot = 1.0;   ///< of the coarse Cholesky factorization
};

/// Solves R A R^T ubar = R b and downscales. A singular coarse matrix raises
/// SolverError naming the smallest pivot.
UpscaledSolution upscale_solve(const ProjectionOperator& proj, const SparseMatrix& a,
                               std::span<const double> b, double tol = default_tolerance);

} // namespace nlmc
