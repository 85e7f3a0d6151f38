#include "nlmc/oracles.hpp"

#include "nlmc/basis.hpp"
#include "nlmc/fem.hpp"
#include "nlmc/grid.hpp"
#include "nlmc/medium.hpp"
#include "nlmc/upscale.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>

namespace nlmc::oracle {

namespace {

const std::vector<std::pair<double, double>> two_bins{{0.5, 20.0}, {50.0, 1e12}};

std::vector<Bin> library_bins()
{
    std::vector<Bin> out;
    for (const auto& [lo, hi] : two_bins)
        out.push_back({lo, hi});
    return out;
}

std::vector<double> perturbed(std::vector<double> kappa, double eps)
{
    for (auto& v : kappa)
        v *= 1.0 + eps;
    return kappa;
}

double energy_distance(const Dense& a, const std::vector<double>& u, const std::vector<double>& v)
{
    std::vector<double> d(u.size());
    for (std::size_t k = 0; k < d.size(); ++k)
        d[k] = u[k] - v[k];
    return std::sqrt(std::max(quad_form(a, d), 0.0));
}

CheckResult dense_kkt_equivalence(double eps)
{
    CheckResult r{"dense KKT equivalence (16x16 fine, 4x4 coarse, full oversampling)", false, 0,
                  1e-8, ""};
    const int n = 16, coarse_n = 4;
    const auto kappa = strip_medium(n, 1e4);

    const auto a = stiffness(n, kappa);
    const auto regs = classify(n, coarse_n, kappa, two_bins);
    const auto ref = global_bases(n, a, regs);
    const auto ref_coarse = coarse_solve(a, unit_load(n), ref);

    const FineMesh mesh(n);
    const CoefficientField field(n, perturbed(kappa, eps));
    const CoarseGrid coarse(mesh, coarse_n);
    const auto regions = decompose_regions(field, coarse, ContrastBins(library_bins()));
    if (regions.total_regions() != static_cast<int>(regs.owner.size())) {
        r.detail = "region counts differ";
        return r;
    }
    const BasisBuilder builder(mesh, field, coarse, regions);
    const auto bases = builder.build_all(coarse_n);

    double worst = 0.0;
    for (std::size_t g = 0; g < bases.size(); ++g) {
        const auto& psi = bases[g];
        if (psi.block != regs.owner[g].first || psi.region != regs.owner[g].second) {
            r.detail = "basis ordering differs";
            return r;
        }
        const double scale = std::sqrt(ref.energy[g]);
        worst = std::max(worst, energy_distance(a, psi.nodal(mesh.num_nodes()), ref.psi[g]) / scale);
    }

    const auto op = assemble_fine_operator(mesh, field, ConstantSource{1.0});
    const auto proj = build_projection(bases, regions, op.dofs);
    const auto up = upscale_solve(proj, op.a, op.b);
    const auto u_ms = op.dofs.to_nodes(up.u_ms, mesh.num_nodes());
    const double u_err = energy_distance(a, u_ms, ref_coarse.u_ms) /
                         std::sqrt(quad_form(a, ref_coarse.u_ms));
    double ubar_err = 0.0, ubar_scale = 0.0;
    for (std::size_t g = 0; g < up.ubar.size(); ++g) {
        ubar_err = std::max(ubar_err, std::abs(up.ubar[g] - ref_coarse.ubar[g]));
        ubar_scale = std::max(ubar_scale, std::abs(ref_coarse.ubar[g]));
    }
    r.value = std::max({worst, u_err, ubar_err / ubar_scale});
    r.passed = r.value <= r.tolerance;
    char buf[200];
    std::snprintf(buf, sizeof buf, "basis %.3e, u_ms %.3e, ubar %.3e (relative)", worst, u_err,
                  ubar_err / ubar_scale);
    r.detail = buf;
    return r;
}

CheckResult poisson_analytic(double eps)
{
    CheckResult r{"Poisson analytic check (kappa=1, f=1, 64x64, center value)", false, 0, 2e-4,
                  ""};
    const int n = 64;
    const FineMesh mesh(n);
    const CoefficientField field(n, perturbed(std::vector<double>(n * n, 1.0), eps));
    const auto op = assemble_fine_operator(mesh, field, ConstantSource{1.0});
    const auto sol = solve_fine(op, mesh.num_nodes());
    const double exact = poisson_series(0.5, 0.5);
    const double fem = sol.values[mesh.node_index(n / 2, n / 2)];
    r.value = std::abs(fem - exact);
    r.passed = r.value <= r.tolerance;
    char buf[200];
    std::snprintf(buf, sizeof buf, "fem %.9f, series %.9f", fem, exact);
    r.detail = buf;
    return r;
}

CheckResult constraint_exactness(double eps)
{
    CheckResult r{"constraint exactness (32x32 fine, 4x4 coarse, m=2)", false, 0, 1e-8, ""};
    const int n = 32, coarse_n = 4;
    const auto kappa = strip_medium(n, 1e4);
    const auto regs = classify(n, coarse_n, kappa, two_bins);

    const FineMesh mesh(n);
    const CoefficientField field(n, perturbed(kappa, eps));
    const CoarseGrid coarse(mesh, coarse_n);
    const auto regions = decompose_regions(field, coarse, ContrastBins(library_bins()));
    const BasisBuilder builder(mesh, field, coarse, regions);
    const auto bases = builder.build_all(2);

    double worst = 0.0;
    for (const auto& psi : bases) {
        const auto u = psi.nodal(mesh.num_nodes());
        const int own = regions.global_index(psi.block, psi.region);
        for (int g : psi.constraint_regions) {
            double mean = 0.0;
            for (std::size_t p = 0; p < u.size(); ++p)
                mean += regs.moment[g][p] * u[p];
            mean /= regs.area[g];
            worst = std::max(worst, std::abs(mean - (g == own ? 1.0 : 0.0)));
        }
    }
    r.value = worst;
    r.passed = worst <= r.tolerance;
    r.detail = std::to_string(bases.size()) + " bases";
    return r;
}

template <class Fn>
CheckResult guarded(const char* name, Fn&& fn)
{
    try {
        return fn();
    } catch (const std::exception& e) {
        return {name, false, 0, 0, std::string("exception: ") + e.what()};
    }
}

} // namespace

std::vector<CheckResult> run_validation(const ValidateOptions& options)
{
    const double eps = options.stiffness_perturbation;
    return {
        guarded("dense KKT equivalence", [&] { return dense_kkt_equivalence(eps); }),
        guarded("Poisson analytic check", [&] { return poisson_analytic(eps); }),
        guarded("constraint exactness", [&] { return constraint_exactness(eps); }),
    };
}

void print_results(std::ostream& os, const std::vector<CheckResult>& results)
{
    char buf[64];
    for (const auto& c : results) {
        std::snprintf(buf, sizeof buf, "%.3e (tol %.1e)", c.value, c.tolerance);
        os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << buf;
        if (!c.detail.empty())
            os << " [" << c.detail << "]";
        os << '\n';
    }
}

} // namespace nlmc::oracle
