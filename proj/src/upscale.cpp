#include "nlmc/upscale.hpp"

#include "nlmc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlmc {

ProjectionOperator build_projection(std::span<const BasisFunction> bases, const RegionMap& regions,
                                    const DofMap& fine_dofs)
{
    const int total = regions.total_regions();
    std::vector<const BasisFunction*> by_region(static_cast<std::size_t>(total), nullptr);
    for (const auto& psi : bases) {
        const int g = regions.global_index(psi.block, psi.region);
        if (by_region[g])
            throw InvalidArgument("duplicate basis for region (" + std::to_string(psi.block) +
                                  ", " + std::to_string(psi.region) + ")");
        by_region[g] = &psi;
    }

    ProjectionOperator proj;
    std::vector<Triplet> t;
    for (int g = 0; g < total; ++g) {
        const auto& reg = regions.region(g);
        if (!by_region[g])
            throw InvalidArgument("missing basis for region (" + std::to_string(reg.block) + ", " +
                                  std::to_string(reg.local) + ")");
        const auto& psi = *by_region[g];
        for (std::size_t k = 0; k < psi.nodes.size(); ++k) {
            const int d = fine_dofs.node_to_dof.at(psi.nodes[k]);
            if (d < 0) {
                if (psi.values[k] != 0.0)
                    throw InvalidArgument("basis has a nonzero value on a Dirichlet node");
                continue;
            }
            t.push_back({g, d, psi.values[k]});
        }
        proj.owners.emplace_back(reg.block, reg.local);
    }
    proj.r = SparseMatrix::from_triplets(total, fine_dofs.size(), t);
    return proj;
}

UpscaledSolution upscale_solve(const ProjectionOperator& proj, const SparseMatrix& a,
                               std::span<const double> b, double tol)
{
    const auto& r = proj.r;
    if (a.rows() != r.cols() || a.cols() != r.cols() || b.size() != static_cast<std::size_t>(r.cols()))
        throw InvalidArgument("projection has " + std::to_string(r.cols()) +
                              " columns but the fine operator has " + std::to_string(a.rows()) +
                              " rows");

    UpscaledSolution out;
    const SparseMatrix rt = r.transpose();
    out.coarse_matrix = r.multiply(a).multiply(rt);
    out.coarse_rhs = r.multiply(b);

    const int nc = r.rows();
    Eigen::MatrixXd dense = Eigen::MatrixXd(out.coarse_matrix.to_eigen());
    dense = 0.5 * (dense + dense.transpose()).eval();
    DenseCholesky chol(dense);
    out.min_relative_pivot = chol.min_relative_pivot();
    if (!chol.ok()) {
        const auto& [blk, reg] = proj.owners.at(static_cast<std::size_t>(chol.failed_row()));
        std::ostringstream msg;
        msg << "coarse matrix is singular: smallest relative pivot " << chol.min_relative_pivot()
            << " at coarse dof (" << blk << ", " << reg
            << "); try more oversampling layers";
        throw SolverError(msg.str());
    }

    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(out.coarse_rhs.data(), nc);
    Eigen::VectorXd u = chol.solve(rhs);
    // One refinement step against the sparse operator.
    {
        const auto au = out.coarse_matrix.multiply(std::span<const double>(u.data(), nc));
        Eigen::VectorXd res(nc);
        for (int k = 0; k < nc; ++k)
            res[k] = rhs[k] - au[k];
        u += chol.solve(res);
    }
    out.ubar.assign(u.data(), u.data() + nc);

    const auto au = out.coarse_matrix.multiply(out.ubar);
    double rn = 0.0;
    for (int k = 0; k < nc; ++k)
        rn = std::max(rn, std::abs(out.coarse_rhs[k] - au[k]));
    const double scale = out.coarse_matrix.norm_inf() * norm_inf(out.ubar) + norm_inf(out.coarse_rhs);
    if (scale > 0 && rn > tol * scale) {
        std::ostringstream msg;
        msg << "coarse solve backward error " << rn / scale << " exceeds tolerance " << tol;
        throw SolverError(msg.str(), rn / scale);
    }
    out.u_ms = r.multiply_transpose(out.ubar);
    return out;
}

} // namespace nlmc
