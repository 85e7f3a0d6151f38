#include "nlmc/oracles.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nlmc::oracle {

std::vector<double> gauss_solve(Dense a, std::vector<double> b)
{
    const int n = a.rows;
    if (a.cols != n || static_cast<int>(b.size()) != n)
        throw std::invalid_argument("gauss_solve: shape mismatch");
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k)))
                p = i;
        if (a(p, k) == 0.0)
            throw std::runtime_error("gauss_solve: singular matrix");
        if (p != k) {
            for (int j = 0; j < n; ++j)
                std::swap(a(k, j), a(p, j));
            std::swap(b[k], b[p]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0)
                continue;
            for (int j = k; j < n; ++j)
                a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j)
            s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

double quad_form(const Dense& a, const std::vector<double>& x)
{
    double s = 0.0;
    for (int i = 0; i < a.rows; ++i) {
        double r = 0.0;
        for (int j = 0; j < a.cols; ++j)
            r += a(i, j) * x[j];
        s += x[i] * r;
    }
    return s;
}

namespace {

int node(int n, int ix, int iy) { return iy * (n + 1) + ix; }

// Two triangles per cell: (00,10,11) and (00,11,01).
std::vector<std::array<int, 3>> cell_triangles(int n, int cx, int cy)
{
    const int a = node(n, cx, cy), b = node(n, cx + 1, cy);
    const int c = node(n, cx + 1, cy + 1), d = node(n, cx, cy + 1);
    return {{a, b, c}, {a, c, d}};
}

bool on_boundary(int n, int p)
{
    const int ix = p % (n + 1), iy = p / (n + 1);
    return ix == 0 || iy == 0 || ix == n || iy == n;
}

std::vector<int> interior(int n)
{
    std::vector<int> out;
    for (int p = 0; p < (n + 1) * (n + 1); ++p)
        if (!on_boundary(n, p))
            out.push_back(p);
    return out;
}

} // namespace

Dense stiffness(int n, const std::vector<double>& kappa)
{
    const int nn = (n + 1) * (n + 1);
    Dense k(nn, nn);
    const double h = 1.0 / n;
    for (int cy = 0; cy < n; ++cy)
        for (int cx = 0; cx < n; ++cx) {
            const double kap = kappa.at(static_cast<std::size_t>(cy * n + cx));
            for (const auto& t : cell_triangles(n, cx, cy)) {
                double x[3], y[3];
                for (int v = 0; v < 3; ++v) {
                    x[v] = (t[v] % (n + 1)) * h;
                    y[v] = (t[v] / (n + 1)) * h;
                }
                // Inverse Jacobian of the affine map from the reference triangle.
                const double j11 = x[1] - x[0], j12 = x[2] - x[0];
                const double j21 = y[1] - y[0], j22 = y[2] - y[0];
                const double det = j11 * j22 - j12 * j21;
                const double area = std::abs(det) / 2.0;
                double g[3][2];
                g[1][0] = j22 / det;
                g[1][1] = -j12 / det;
                g[2][0] = -j21 / det;
                g[2][1] = j11 / det;
                g[0][0] = -g[1][0] - g[2][0];
                g[0][1] = -g[1][1] - g[2][1];
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        k(t[a], t[b]) += kap * area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
            }
        }
    return k;
}

std::vector<double> unit_load(int n)
{
    std::vector<double> b(static_cast<std::size_t>((n + 1) * (n + 1)), 0.0);
    const double tri_area = 0.5 / (static_cast<double>(n) * n);
    for (int cy = 0; cy < n; ++cy)
        for (int cx = 0; cx < n; ++cx)
            for (const auto& t : cell_triangles(n, cx, cy))
                for (int p : t)
                    b[p] += tri_area / 3.0;
    return b;
}

Regions classify(int n, int coarse, const std::vector<double>& kappa,
                 const std::vector<std::pair<double, double>>& bins)
{
    if (n % coarse != 0)
        throw std::invalid_argument("classify: coarse size must divide fine size");
    const int r = n / coarse;
    const int nn = (n + 1) * (n + 1);
    const double tri_area = 0.5 / (static_cast<double>(n) * n);
    Regions out;
    for (int by = 0; by < coarse; ++by)
        for (int bx = 0; bx < coarse; ++bx) {
            const int block = by * coarse + bx;
            std::vector<int> bin_of;
            for (int cy = by * r; cy < (by + 1) * r; ++cy)
                for (int cx = bx * r; cx < (bx + 1) * r; ++cx) {
                    const double v = kappa[static_cast<std::size_t>(cy * n + cx)];
                    int found = -1;
                    for (std::size_t k = 0; k < bins.size(); ++k)
                        if (v >= bins[k].first && v <= bins[k].second)
                            found = static_cast<int>(k);
                    if (found < 0)
                        throw std::invalid_argument("classify: value outside every bin");
                    bin_of.push_back(found);
                }
            int local = 0;
            for (std::size_t k = 0; k < bins.size(); ++k) {
                std::vector<double> m(static_cast<std::size_t>(nn), 0.0);
                double area = 0.0;
                int idx = 0;
                for (int cy = by * r; cy < (by + 1) * r; ++cy)
                    for (int cx = bx * r; cx < (bx + 1) * r; ++cx, ++idx) {
                        if (bin_of[idx] != static_cast<int>(k))
                            continue;
                        for (const auto& t : cell_triangles(n, cx, cy)) {
                            for (int p : t)
                                m[p] += tri_area / 3.0;
                            area += tri_area;
                        }
                    }
                if (area == 0.0)
                    continue;
                out.owner.emplace_back(block, local++);
                out.moment.push_back(std::move(m));
                out.area.push_back(area);
            }
        }
    return out;
}

GlobalBases global_bases(int n, const Dense& a, const Regions& regions)
{
    const auto in = interior(n);
    const int ni = static_cast<int>(in.size());
    const int nc = static_cast<int>(regions.owner.size());
    Dense kkt(ni + nc, ni + nc);
    for (int i = 0; i < ni; ++i)
        for (int j = 0; j < ni; ++j)
            kkt(i, j) = a(in[i], in[j]);
    for (int c = 0; c < nc; ++c)
        for (int i = 0; i < ni; ++i) {
            const double v = regions.moment[c][in[i]] / regions.area[c];
            kkt(ni + c, i) = v;
            kkt(i, ni + c) = v;
        }
    GlobalBases out;
    for (int g = 0; g < nc; ++g) {
        std::vector<double> rhs(static_cast<std::size_t>(ni + nc), 0.0);
        rhs[ni + g] = 1.0;
        const auto x = gauss_solve(kkt, rhs);
        std::vector<double> psi(static_cast<std::size_t>(a.rows), 0.0);
        for (int i = 0; i < ni; ++i)
            psi[in[i]] = x[i];
        out.energy.push_back(quad_form(a, psi));
        out.psi.push_back(std::move(psi));
    }
    return out;
}

CoarseSolution coarse_solve(const Dense& a, const std::vector<double>& load,
                            const GlobalBases& bases)
{
    const int nc = static_cast<int>(bases.psi.size());
    const int nn = a.rows;
    std::vector<std::vector<double>> apsi(nc, std::vector<double>(nn, 0.0));
    for (int g = 0; g < nc; ++g)
        for (int i = 0; i < nn; ++i) {
            double s = 0.0;
            for (int j = 0; j < nn; ++j)
                s += a(i, j) * bases.psi[g][j];
            apsi[g][i] = s;
        }
    Dense c(nc, nc);
    std::vector<double> rhs(nc, 0.0);
    for (int g = 0; g < nc; ++g) {
        for (int h = 0; h < nc; ++h) {
            double s = 0.0;
            for (int i = 0; i < nn; ++i)
                s += bases.psi[g][i] * apsi[h][i];
            c(g, h) = s;
        }
        for (int i = 0; i < nn; ++i)
            rhs[g] += bases.psi[g][i] * load[i];
    }
    CoarseSolution out;
    out.ubar = gauss_solve(c, rhs);
    out.u_ms.assign(nn, 0.0);
    for (int g = 0; g < nc; ++g)
        for (int i = 0; i < nn; ++i)
            out.u_ms[i] += out.ubar[g] * bases.psi[g][i];
    return out;
}

std::vector<double> fine_solve(int n, const Dense& a, const std::vector<double>& load)
{
    const auto in = interior(n);
    const int ni = static_cast<int>(in.size());
    Dense ai(ni, ni);
    std::vector<double> bi(ni);
    for (int i = 0; i < ni; ++i) {
        for (int j = 0; j < ni; ++j)
            ai(i, j) = a(in[i], in[j]);
        bi[i] = load[in[i]];
    }
    const auto x = gauss_solve(std::move(ai), std::move(bi));
    std::vector<double> u(static_cast<std::size_t>(a.rows), 0.0);
    for (int i = 0; i < ni; ++i)
        u[in[i]] = x[i];
    return u;
}

double poisson_series(double x, double y, int terms)
{
    const double pi = std::numbers::pi;
    double s = 0.0;
    for (int m = 1; m <= terms; m += 2) {
        const double sx = std::sin(m * pi * x);
        for (int k = 1; k <= terms; k += 2)
            s += sx * std::sin(k * pi * y) / (static_cast<double>(m) * k * (m * m + k * k));
    }
    return 16.0 / std::pow(pi, 4) * s;
}

std::vector<double> strip_medium(int n, double contrast)
{
    std::vector<double> k(static_cast<std::size_t>(n) * n, 1.0);
    for (int cy = 0; cy < n; ++cy)
        for (int cx = 0; cx < n; ++cx) {
            const double x = (cx + 0.5) / n, y = (cy + 0.5) / n;
            const bool strip = y > 0.375 && y < 0.5;
            const bool riser = x > 0.625 && x < 0.75 && y > 0.5;
            const bool inclusion = x > 0.125 && x < 0.25 && y > 0.125 && y < 0.25;
            if (strip || riser || inclusion)
                k[static_cast<std::size_t>(cy) * n + cx] = contrast;
        }
    return k;
}

} // namespace nlmc::oracle
