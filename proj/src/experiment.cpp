#include "nlmc/experiment.hpp"

#include "nlmc/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace nlmc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

} // namespace

std::shared_ptr<const FineReference> make_fine_reference(const FineMesh& mesh,
                                                         CoefficientField field,
                                                         const SourceTerm& source, double tol)
{
    const auto t0 = Clock::now();
    auto op = assemble_fine_operator(mesh, field, source);
    auto full = assemble_full_stiffness(mesh, field);
    auto sol = solve_fine(op, mesh.num_nodes(), tol);
    auto ref = std::make_shared<FineReference>(FineReference{
        mesh, std::move(field), std::move(op), std::move(full), std::move(sol), 0.0});
    ref->seconds = seconds_since(t0);
    return ref;
}

nlohmann::json to_json(const ErrorReport& r)
{
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : r.bins)
        bins.push_back({b.lo, b.hi});
    return {
        {"e_L2", r.e_L2},
        {"e_L2_sq", r.e_L2_sq},
        {"e_energy", r.e_energy},
        {"e_L2_fine", r.e_L2_fine},
        {"mean_defect", r.mean_defect},
        {"min_relative_pivot", r.min_relative_pivot},
        {"H", r.H},
        {"h", r.h},
        {"layers", r.layers},
        {"low_accuracy", r.low_accuracy},
        {"contrast", r.contrast},
        {"region_contrast", r.region_contrast},
        {"bins", bins},
        {"total_regions", r.total_regions},
        {"timings",
         {{"fine", r.timings.fine},
          {"basis", r.timings.basis},
          {"coarse", r.timings.coarse},
          {"total", r.timings.total}}},
    };
}

Experiment::Experiment(const ExperimentConfig& config)
    : Experiment(config, make_fine_reference(FineMesh(config.fine),
                                             build_medium(config.medium, config.fine),
                                             config.source, config.tolerance))
{
}

Experiment::Experiment(const ExperimentConfig& config,
                       std::shared_ptr<const FineReference> reference)
    : config_(config),
      reference_(std::move(reference)),
      coarse_(reference_->mesh, config.coarse),
      regions_(decompose_regions(reference_->field, coarse_, ContrastBins(config.bins),
                                 config.split_components))
{
    if (reference_->mesh.n_side() != config.fine)
        throw InvalidArgument("fine reference has a different mesh size");
}

int Experiment::layers() const
{
    if (config_.layers)
        return *config_.layers;
    return auto_layers(field().kappa_max(), coarse_.H(), config_.layers_offset);
}

BasisBuilder Experiment::builder() const
{
    return BasisBuilder(mesh(), field(), coarse_, regions_, config_.tolerance);
}

RunResult Experiment::run(int layers) const
{
    if (layers < 0)
        throw InvalidArgument("oversampling layers must be non-negative");
    const auto t0 = Clock::now();
    RunResult out;
    const auto& ref = *reference_;

    out.bases = builder().build_all(layers, config_.threads);
    const auto t1 = Clock::now();

    const auto proj = build_projection(out.bases, regions_, ref.op.dofs);
    out.upscaled = upscale_solve(proj, ref.op.a, ref.op.b, config_.tolerance);
    out.u_ms = ref.op.dofs.to_nodes(out.upscaled.u_ms, mesh().num_nodes());
    const auto t2 = Clock::now();

    auto& r = out.report;
    const auto& u_f = ref.solution.values;
    const auto f_avg = coarse_cell_averages(u_f, mesh(), coarse_);
    const auto ms_avg = block_averages_from_regions(out.upscaled.ubar, regions_, coarse_);
    const std::vector<double> areas(static_cast<std::size_t>(coarse_.num_blocks()),
                                    coarse_.block_area());
    const auto e = relative_L2_error(f_avg, ms_avg, areas);
    r.e_L2 = e.value;
    r.e_L2_sq = e.squared;
    r.e_energy = energy_error(u_f, out.u_ms, ref.full_stiffness);
    std::vector<double> diff(u_f.size());
    for (std::size_t k = 0; k < diff.size(); ++k)
        diff[k] = u_f[k] - out.u_ms[k];
    const double l2f = l2_norm(mesh(), u_f);
    r.e_L2_fine = l2f > 0 ? l2_norm(mesh(), diff) / l2f
                          : std::numeric_limits<double>::quiet_NaN();
    const auto means = region_averages(out.u_ms, mesh(), regions_);
    for (std::size_t g = 0; g < means.size(); ++g)
        r.mean_defect = std::max(r.mean_defect, std::abs(means[g] - out.upscaled.ubar[g]));
    r.min_relative_pivot = out.upscaled.min_relative_pivot;
    r.H = coarse_.H();
    r.h = mesh().h();
    r.layers = layers;
    r.low_accuracy = layers == 0;
    r.contrast = field().contrast();
    r.region_contrast = regions_.contrast_ratio();
    r.bins = config_.bins;
    r.total_regions = regions_.total_regions();
    if (config_.record_timings) {
        r.timings.fine = ref.seconds;
        r.timings.basis = std::chrono::duration<double>(t1 - t0).count();
        r.timings.coarse = std::chrono::duration<double>(t2 - t1).count();
        r.timings.total = seconds_since(t0);
    }
    return out;
}

SweepAxis parse_axis(const std::string& name)
{
    if (name == "layers" || name == "m")
        return SweepAxis::layers;
    if (name == "H" || name == "coarse" || name == "coarse_size")
        return SweepAxis::coarse;
    if (name == "contrast")
        return SweepAxis::contrast;
    throw InvalidArgument("unknown sweep axis '" + name + "' (expected layers, H or contrast)");
}

std::string axis_name(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::layers: return "layers";
    case SweepAxis::coarse: return "H";
    case SweepAxis::contrast: return "contrast";
    }
    return "?";
}

SweepTable sweep(const ExperimentConfig& config, SweepAxis axis, std::vector<double> values)
{
    if (values.empty())
        throw InvalidArgument("sweep needs at least one value");
    if (axis == SweepAxis::contrast && config.medium.type != "channels")
        throw InvalidArgument("the contrast axis needs a channels medium");

    struct SweepPoint {
        double parameter;
        ExperimentConfig config;
    };
    std::vector<SweepPoint> points;
    for (double v : values) {
        if (!std::isfinite(v) || v < 0)
            throw InvalidArgument("sweep values must be finite and non-negative");
        ExperimentConfig c = config;
        double p = v;
        switch (axis) {
        case SweepAxis::layers:
            if (v != std::floor(v))
                throw InvalidArgument("layer counts must be integers");
            c.layers = static_cast<int>(v);
            break;
        case SweepAxis::coarse: {
            if (v == 0)
                throw InvalidArgument("coarse size must be positive");
            const double n = v < 1 ? 1.0 / v : v;
            c.coarse = static_cast<int>(std::lround(n));
            if (std::abs(n - c.coarse) > 1e-9 * n)
                throw InvalidArgument("H must be the reciprocal of an integer");
            p = 1.0 / c.coarse;
            break;
        }
        case SweepAxis::contrast:
            if (v <= 0)
                throw InvalidArgument("contrast must be positive");
            c.medium.contrast = v;
            break;
        }
        points.push_back({p, std::move(c)});
    }
    std::stable_sort(points.begin(), points.end(),
                     [](const SweepPoint& a, const SweepPoint& b) { return a.parameter < b.parameter; });

    SweepTable table;
    table.axis = axis;
    std::shared_ptr<const FineReference> shared;
    std::unique_ptr<Experiment> layer_experiment;
    for (const auto& pt : points) {
        SweepRow row;
        row.parameter = pt.parameter;
        const auto t0 = Clock::now();
        try {
            const Experiment* exp = nullptr;
            std::unique_ptr<Experiment> local;
            if (axis == SweepAxis::layers) {
                if (!layer_experiment)
                    layer_experiment = std::make_unique<Experiment>(pt.config);
                exp = layer_experiment.get();
            } else if (axis == SweepAxis::coarse) {
                if (!shared)
                    shared = make_fine_reference(FineMesh(pt.config.fine),
                                                 build_medium(pt.config.medium, pt.config.fine),
                                                 pt.config.source, pt.config.tolerance);
                local = std::make_unique<Experiment>(pt.config, shared);
                exp = local.get();
            } else {
                local = std::make_unique<Experiment>(pt.config);
                exp = local.get();
            }
            row.layers = axis == SweepAxis::layers ? *pt.config.layers : exp->layers();
            const auto res = exp->run(row.layers);
            row.e_L2 = res.report.e_L2;
            row.e_L2_sq = res.report.e_L2_sq;
            row.e_energy = res.report.e_energy;
            row.mean_defect = res.report.mean_defect;
        } catch (const std::exception& e) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.e_L2 = row.e_L2_sq = row.e_energy = row.mean_defect = nan;
            row.status = std::string("error: ") + e.what();
        }
        row.seconds = config.record_timings ? seconds_since(t0) : 0.0;
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string sweep_csv(const SweepTable& table)
{
    std::string out = "parameter,layers,e_L2,e_L2_sq,e_energy,seconds,status\n";
    char buf[256];
    for (const auto& r : table.rows) {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        std::snprintf(buf, sizeof buf, "%.12g,%d,%.12g,%.12g,%.12g,%.6f,", r.parameter, r.layers,
                      r.e_L2, r.e_L2_sq, r.e_energy, r.seconds);
        out += buf;
        out += status;
        out += '\n';
    }
    return out;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepTable& table)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw InvalidArgument("cannot write '" + path.string() + "'");
    f << sweep_csv(table);
    if (!f)
        throw InvalidArgument("failed writing '" + path.string() + "'");
}

} // namespace nlmc
