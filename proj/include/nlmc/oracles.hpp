#pragma once

// Dense reference implementations. They share no assembly, classification or
// solver code with the library so that agreement between the two is evidence.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace nlmc::oracle {

/// Row-major dense matrix.
struct Dense {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Dense() = default;
    Dense(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

/// Gaussian elimination with partial pivoting; throws on a zero pivot.
std::vector<double> gauss_solve(Dense a, std::vector<double> b);

double quad_form(const Dense& a, const std::vector<double>& x);

/// Stiffness over all (n+1)^2 lattice nodes of the unit square, cells split
/// along the rising diagonal; `kappa` holds one value per cell, row-major.
Dense stiffness(int n, const std::vector<double>& kappa);

/// Load vector for f = 1.
std::vector<double> unit_load(int n);

/// Regions of an n x n fine grid cut into N x N blocks by the given bins.
struct Regions {
    std::vector<std::pair<int, int>> owner;  ///< (block, local index) per region
    std::vector<std::vector<double>> moment; ///< int_region phi_p for every node p
    std::vector<double> area;
};

Regions classify(int n, int coarse, const std::vector<double>& kappa,
                 const std::vector<std::pair<double, double>>& bins);

/// Global bases from the full KKT system on the interior nodes; nodal vectors.
struct GlobalBases {
    std::vector<std::vector<double>> psi;
    std::vector<double> energy;
};

GlobalBases global_bases(int n, const Dense& a, const Regions& regions);

/// Coarse solve with the global bases: ubar and downscaled nodal u_ms.
struct CoarseSolution {
    std::vector<double> ubar;
    std::vector<double> u_ms;
};

CoarseSolution coarse_solve(const Dense& a, const std::vector<double>& load,
                            const GlobalBases& bases);

/// Fine Dirichlet solve on interior nodes; nodal vector.
std::vector<double> fine_solve(int n, const Dense& a, const std::vector<double>& load);

/// Series solution of -Laplace(u) = 1 on the unit square with zero boundary values.
double poisson_series(double x, double y, int terms = 400);

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct ValidateOptions {
    /// Test hook: the library side sees kappa multiplied by (1 + this).
    double stiffness_perturbation = 0.0;
};

/// Built-in oracle suite: dense KKT equivalence, Poisson analytic check and
/// constraint exactness.
std::vector<CheckResult> run_validation(const ValidateOptions& options = {});

void print_results(std::ostream& os, const std::vector<CheckResult>& results);

/// 16x16 strip-and-inclusion medium used by the dense-oracle comparisons.
std::vector<double> strip_medium(int n, double contrast);

} // namespace nlmc::oracle
