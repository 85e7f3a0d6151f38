#pragma once

#include "nlmc/basis.hpp"
#include "nlmc/fem.hpp"
#include "nlmc/grid.hpp"
#include "nlmc/medium.hpp"
#include "nlmc/oracles.hpp"

#include <random>
#include <vector>

namespace nlmc::test {

inline std::vector<Bin> two_bins() { return {{0.5, 20.0}, {50.0, 1e12}}; }

/// Mesh, strip medium, coarse grid and regions for small dense-oracle comparisons.
struct Problem {
    FineMesh mesh;
    CoefficientField field;
    CoarseGrid coarse;
    RegionMap regions;

    Problem(int n, int coarse_n, std::vector<double> kappa, std::vector<Bin> bins = two_bins())
        : mesh(n),
          field(n, std::move(kappa)),
          coarse(mesh, coarse_n),
          regions(decompose_regions(field, coarse, ContrastBins(std::move(bins))))
    {
    }

    BasisBuilder builder(double tol = default_tolerance) const
    {
        return BasisBuilder(mesh, field, coarse, regions, tol);
    }
};

inline Problem strip_problem(int n, int coarse_n, double contrast = 1e4)
{
    return Problem(n, coarse_n, oracle::strip_medium(n, contrast));
}

inline Problem channel_problem(int n, int coarse_n, double contrast = 1e4, std::uint64_t seed = 7)
{
    return Problem(n, coarse_n, channelized_medium(n, contrast, seed).values());
}

inline std::vector<double> random_vector(std::size_t n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v)
        x = u(rng);
    return v;
}

inline std::vector<std::pair<double, double>> as_pairs(const std::vector<Bin>& bins)
{
    std::vector<std::pair<double, double>> out;
    for (const auto& b : bins)
        out.emplace_back(b.lo, b.hi);
    return out;
}

} // namespace nlmc::test
