// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "nlmc/analysis.hpp"
#include "nlmc/basis.hpp"
#include "nlmc/config.hpp"
#include "nlmc/experiment.hpp"
#include "nlmc/fem.hpp"
#include "nlmc/oracles.hpp"
#include "nlmc/upscale.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace nlmc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    Outcome outcome;
};

// Largest region-mean defect seen by any solve of criteria 1-6.
double worst_mean_defect = 0.0;
int defect_solves = 0;

void record_defect(double d)
{
    worst_mean_defect = std::max(worst_mean_defect, std::isnan(d) ? INFINITY : d);
    ++defect_solves;
}

ExperimentConfig analog(int fine, int coarse, int layers)
{
    ExperimentConfig c;
    c.fine = fine;
    c.coarse = coarse;
    c.layers = layers;
    c.medium.type = "channels";
    c.medium.contrast = 1e4;
    c.medium.seed = 1;
    c.record_timings = false;
    return c;
}

std::string join_errors(const SweepTable& t)
{
    std::string s;
    for (const auto& r : t.rows)
        s += fmt("%s%.4g", s.empty() ? "" : ", ", r.e_L2);
    return s;
}

bool all_ok(const SweepTable& t, std::string& why)
{
    for (const auto& r : t.rows)
        if (r.status != "ok") {
            why = fmt("row %g: %s", r.parameter, r.status.c_str());
            return false;
        }
    return true;
}

Outcome constraint_exactness()
{
    const auto t0 = Clock::now();
    const Experiment ex(analog(64, 8, 3));
    const auto res = ex.run();
    const double secs = seconds_since(t0);
    record_defect(res.report.mean_defect);

    double worst = 0.0;
    for (const auto& psi : res.bases) {
        const auto nodal = psi.nodal(ex.mesh().num_nodes());
        const int own = ex.regions().global_index(psi.block, psi.region);
        for (int g : psi.constraint_regions) {
            const double target = g == own ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(region_mean(ex.mesh(), ex.regions(), g, nodal) - target));
        }
    }
    return {worst <= 1e-8 && secs <= 60.0,
            fmt("%zu bases, max region-mean error %.3e (<= 1e-8), runtime %.2f s (<= 60 s)",
                res.bases.size(), worst, secs)};
}

Outcome dense_oracle()
{
    const auto check = oracle::run_validation().front();

    // Mean defect of the same solve, for criterion 3.
    const int n = 16;
    const FineMesh mesh(n);
    const CoefficientField field(n, oracle::strip_medium(n, 1e4));
    const CoarseGrid coarse(mesh, 4);
    const auto regions = decompose_regions(field, coarse, ContrastBins({{0.5, 20.0}, {50.0, 1e12}}));
    const auto op = assemble_fine_operator(mesh, field, ConstantSource{1.0});
    const auto proj = build_projection(BasisBuilder(mesh, field, coarse, regions).build_all(4), regions,
                                       op.dofs);
    const auto up = upscale_solve(proj, op.a, op.b);
    const auto means = region_averages(op.dofs.to_nodes(up.u_ms, mesh.num_nodes()), mesh, regions);
    double defect = 0.0;
    for (std::size_t g = 0; g < means.size(); ++g)
        defect = std::max(defect, std::abs(means[g] - up.ubar[g]));
    record_defect(defect);

    return {check.passed, fmt("max relative energy-norm difference %.3e (<= 1e-8): %s", check.value,
                              check.detail.c_str())};
}

struct LayerSweep {
    SweepTable table;
    std::string csv;
    double seconds = 0.0;
};

LayerSweep layer_sweep()
{
    const auto t0 = Clock::now();
    LayerSweep s;
    s.table = sweep(analog(100, 10, 3), SweepAxis::layers, {1, 2, 3, 4, 5, 6});
    s.seconds = seconds_since(t0);
    const auto path = std::filesystem::temp_directory_path() / "nlmc_acceptance_sweep_layers.csv";
    write_sweep_csv(path, s.table);
    std::ifstream in(path, std::ios::binary);
    s.csv.assign(std::istreambuf_iterator<char>(in), {});
    return s;
}

Outcome layer_trend(const LayerSweep& s)
{
    for (const auto& r : s.table.rows)
        record_defect(r.mean_defect);
    std::string why;
    if (!all_ok(s.table, why))
        return {false, why};
    const auto& rows = s.table.rows;
    bool monotone = true;
    for (std::size_t k = 2; k < rows.size(); ++k)  // m >= 2
        monotone = monotone && rows[k].e_L2 <= rows[k - 1].e_L2;
    const double ratio = rows[5].e_L2 / rows[2].e_L2;
    return {monotone && ratio <= 0.1 && s.seconds <= 300.0,
            fmt("e_L2(m=1..6) = %s; non-increasing for m >= 2: %s; e(6)/e(3) = %.3e (<= 0.1); "
                "runtime %.1f s (<= 300 s)",
                join_errors(s.table).c_str(), monotone ? "yes" : "no", ratio, s.seconds)};
}

Outcome contrast_trend()
{
    const auto t = sweep(analog(100, 10, 4), SweepAxis::contrast, {1e3, 1e4, 1e5, 1e6});
    for (const auto& r : t.rows)
        record_defect(r.mean_defect);
    std::string why;
    if (!all_ok(t, why))
        return {false, why};
    bool increasing = true;
    for (std::size_t k = 1; k < t.rows.size(); ++k)
        increasing = increasing && t.rows[k].e_L2 > t.rows[k - 1].e_L2;
    return {increasing, fmt("m=4, contrast 1e3..1e6: e_L2 = %s; increasing: %s",
                            join_errors(t).c_str(), increasing ? "yes" : "no")};
}

Outcome coarse_trend()
{
    auto config = analog(100, 10, 3);
    config.layers = std::nullopt;
    const auto t = sweep(config, SweepAxis::coarse, {5, 10, 20});
    for (const auto& r : t.rows)
        record_defect(r.mean_defect);
    std::string why;
    if (!all_ok(t, why))
        return {false, why};
    // Rows ascend in H, so e_L2 must increase along the table.
    bool decreasing = true;
    for (std::size_t k = 1; k < t.rows.size(); ++k)
        decreasing = decreasing && t.rows[k].e_L2 > t.rows[k - 1].e_L2;
    std::string layers;
    for (auto it = t.rows.rbegin(); it != t.rows.rend(); ++it)
        layers += fmt("%s%d", layers.empty() ? "" : ", ", it->layers);
    std::string errors;
    for (auto it = t.rows.rbegin(); it != t.rows.rend(); ++it)
        errors += fmt("%s%.4g", errors.empty() ? "" : ", ", it->e_L2);
    return {decreasing, fmt("N = 5, 10, 20 with auto layers m = %s: e_L2 = %s; strictly decreasing: %s",
                            layers.c_str(), errors.c_str(), decreasing ? "yes" : "no")};
}

// Not a criterion: the same H sweep with one extra layer per halving of H.
std::string coarse_trend_diagnostic()
{
    std::string out;
    const int sizes[] = {5, 10, 20};
    const int layers[] = {3, 4, 5};
    for (int k = 0; k < 3; ++k) {
        const auto r = Experiment(analog(100, sizes[k], layers[k])).run().report;
        record_defect(r.mean_defect);
        out += fmt("%sN=%d m=%d: %.4g", out.empty() ? "" : ", ", sizes[k], layers[k], r.e_L2);
    }
    return out;
}

Outcome fine_solver()
{
    const double series = oracle::poisson_series(0.5, 0.5, 2001);
    auto center_error = [&](int n) {
        const FineMesh mesh(n);
        const auto op = assemble_fine_operator(mesh, constant_medium(n, 1.0), ConstantSource{1.0});
        const auto u = solve_fine(op, mesh.num_nodes()).values;
        return std::abs(u[mesh.node_index(n / 2, n / 2)] - series);
    };
    const double e32 = center_error(32), e64 = center_error(64);
    const double ratio = e32 / e64;
    return {e64 <= 2e-4 && ratio >= 3.5 && ratio <= 4.5,
            fmt("|u_h(center) - series| at n=64: %.3e (<= 2e-4); ratio e(32)/e(64) = %.3f (in [3.5, 4.5])",
                e64, ratio)};
}

Outcome decay_profile()
{
    const Experiment ex(analog(64, 8, 3));
    const auto builder = ex.builder();
    const int block = ex.coarse().block_index(4, 4);
    bool ok = true;
    std::string detail = fmt("block %d:", block);
    for (const auto& psi : builder.build_block(block, 4)) {
        const auto profile = basis_decay_profile(psi, ex.mesh(), ex.field(), ex.coarse());
        bool decreasing = true;
        for (std::size_t k = 1; k < profile.size(); ++k)
            decreasing = decreasing && profile[k].fraction < profile[k - 1].fraction;
        ok = ok && decreasing && profile.back().fraction == 0.0;
        detail += fmt(" region %d [", psi.region);
        for (std::size_t k = 0; k < profile.size(); ++k)
            detail += fmt("%s%.3g", k ? ", " : "", profile[k].fraction);
        detail += "]";
    }
    return {ok, detail};
}

Outcome determinism(const LayerSweep& first)
{
    const auto second = layer_sweep();
    const bool same = !first.csv.empty() && first.csv == second.csv;
    return {same, fmt("two layer sweeps (seed 1, 1 thread): %zu bytes, %s", first.csv.size(),
                      same ? "bit-identical" : "DIFFERENT")};
}

Outcome guarded(const std::function<Outcome()>& fn)
{
    try {
        return fn();
    } catch (const std::exception& e) {
        return {false, std::string("exception: ") + e.what()};
    }
}

} // namespace

int main()
{
    std::vector<Criterion> results;
    auto report = [&](int id, const std::string& name, Outcome o) {
        std::printf("[%s] criterion %d (%s): %s\n", o.passed ? "PASS" : "FAIL", id, name.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
        results.push_back({id, name, std::move(o)});
    };

    LayerSweep layers;
    report(1, "constraint exactness", guarded(constraint_exactness));
    report(2, "dense oracle equivalence", guarded(dense_oracle));
    report(4, "layer decay trend", guarded([&] {
               layers = layer_sweep();
               return layer_trend(layers);
           }));
    report(5, "contrast sensitivity trend", guarded(contrast_trend));
    report(6, "H convergence trend", guarded(coarse_trend));
    try {
        std::printf("       diagnostic only (not criterion 6): %s\n", coarse_trend_diagnostic().c_str());
    } catch (const std::exception& e) {
        std::printf("       diagnostic failed: %s\n", e.what());
    }
    report(3, "region means of u_ms equal ubar",
           {defect_solves > 0 && worst_mean_defect <= 1e-8,
            fmt("max |mean(u_ms) - ubar| over %d solves: %.3e (<= 1e-8)", defect_solves,
                worst_mean_defect)});
    report(7, "fine solver validation", guarded(fine_solver));
    report(8, "basis decay profile", guarded(decay_profile));
    report(9, "determinism", guarded([&] { return determinism(layers); }));

    std::sort(results.begin(), results.end(),
              [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
    int failed = 0;
    std::printf("\nsummary:\n");
    for (const auto& c : results) {
        std::printf("  criterion %d %s: %s\n", c.id, c.outcome.passed ? "PASS" : "FAIL", c.name.c_str());
        failed += !c.outcome.passed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
    return failed == 0 ? 0 : 1;
}
