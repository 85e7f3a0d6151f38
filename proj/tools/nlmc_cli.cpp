// nlmc: command-line driver for NLMC upscaling experiments.

#include "nlmc/analysis.hpp"
#include "nlmc/config.hpp"
#include "nlmc/errors.hpp"
#include "nlmc/experiment.hpp"
#include "nlmc/oracles.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace nlmc;

namespace {

enum Exit { ok = 0, usage = 1, data = 2, solver = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Overrides {
    std::string config;
    std::string out;
    std::string layers;
    std::int64_t seed = -1;
    int threads = 0;
};

ExperimentConfig load(const Overrides& o)
{
    ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
    if (!o.out.empty())
        c.output_dir = o.out;
    if (!o.layers.empty()) {
        if (o.layers == "auto") {
            c.layers.reset();
        } else {
            std::size_t used = 0;
            int m = -1;
            try {
                m = std::stoi(o.layers, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != o.layers.size() || m < 0)
                throw UsageError("--layers expects a non-negative integer or 'auto'");
            c.layers = m;
        }
    }
    if (o.seed >= 0)
        c.medium.seed = static_cast<std::uint64_t>(o.seed);
    if (o.threads > 0)
        c.threads = o.threads;
    return c;
}

/// Files written by one command; removed again if the command fails.
class Artifacts {
public:
    explicit Artifacts(fs::path dir) : dir_(std::move(dir))
    {
        created_dir_ = !fs::exists(dir_);
        fs::create_directories(dir_);
    }
    ~Artifacts()
    {
        if (committed_)
            return;
        std::error_code ec;
        for (const auto& p : files_)
            fs::remove(p, ec);
        if (created_dir_ && fs::is_empty(dir_, ec))
            fs::remove(dir_, ec);
    }
    fs::path add(const std::string& name)
    {
        files_.push_back(dir_ / name);
        return files_.back();
    }
    void commit() { committed_ = true; }

private:
    fs::path dir_;
    std::vector<fs::path> files_;
    bool created_dir_ = false;
    bool committed_ = false;
};

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text))
        throw InvalidArgument("cannot write '" + path.string() + "'");
}

std::string fmt(const char* spec, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

int cmd_solve(const Overrides& o)
{
    const auto config = load(o);
    Artifacts out(config.output_dir);
    const Experiment exp(config);
    const int m = exp.layers();
    if (m == 0)
        std::cerr << "warning: m = 0 gives a low-accuracy basis\n";
    const auto res = exp.run(m);
    const auto& r = res.report;

    write_field_dump(out.add("fine_solution.txt"), exp.mesh(), exp.reference().solution.values);
    write_field_dump(out.add("u_ms.txt"), exp.mesh(), res.u_ms);

    std::ostringstream ubar;
    ubar << "region,block,local,bin,area,ubar,fine_mean\n";
    const auto fine_means = region_averages(exp.reference().solution.values, exp.mesh(),
                                            exp.regions());
    for (int g = 0; g < exp.regions().total_regions(); ++g) {
        const auto& reg = exp.regions().region(g);
        ubar << g << ',' << reg.block << ',' << reg.local << ',' << reg.bin << ','
             << fmt("%.12g", reg.area) << ',' << fmt("%.12g", res.upscaled.ubar[g]) << ','
             << fmt("%.12g", fine_means[g]) << '\n';
    }
    write_text(out.add("ubar.csv"), ubar.str());

    nlohmann::json report = {{"config", to_json(config)}, {"report", to_json(r)}};
    write_text(out.add("report.json"), report.dump(2) + "\n");
    out.commit();

    std::cout << "layers          " << r.layers << (r.low_accuracy ? " (low accuracy)" : "") << '\n'
              << "total_regions   " << r.total_regions << '\n'
              << "e_L2            " << fmt("%.6e", r.e_L2) << " (squared " << fmt("%.6e", r.e_L2_sq)
              << ")\n"
              << "e_energy        " << fmt("%.6e", r.e_energy) << '\n'
              << "e_L2_fine       " << fmt("%.6e", r.e_L2_fine) << '\n'
              << "mean_defect     " << fmt("%.3e", r.mean_defect) << '\n'
              << "timings [s]     fine " << fmt("%.3f", r.timings.fine) << ", basis "
              << fmt("%.3f", r.timings.basis) << ", coarse " << fmt("%.3f", r.timings.coarse)
              << '\n'
              << "output          " << config.output_dir << '\n';
    return ok;
}

std::vector<double> parse_values(const std::string& csv)
{
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
            ++used;
        if (used == 0 || used != item.size())
            throw UsageError("--values expects a comma-separated list of numbers, got '" + item +
                             "'");
        out.push_back(v);
    }
    if (out.empty())
        throw UsageError("--values is empty");
    return out;
}

int cmd_sweep(const Overrides& o, const std::string& axis_name_in, const std::string& values)
{
    const auto config = load(o);
    SweepAxis axis;
    try {
        axis = parse_axis(axis_name_in);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const auto vals = parse_values(values);
    Artifacts out(config.output_dir);
    const auto table = sweep(config, axis, vals);
    const auto path = out.add("sweep_" + axis_name(axis) + ".csv");
    write_sweep_csv(path, table);
    out.commit();
    std::cout << sweep_csv(table);
    int failed = 0;
    for (const auto& r : table.rows)
        failed += r.status != "ok";
    if (failed)
        std::cerr << failed << " sweep row(s) failed; see the status column\n";
    std::cout << "written " << path.string() << '\n';
    return ok;
}

int cmd_basis(const Overrides& o, int block, int region)
{
    const auto config = load(o);
    const Experiment exp(config);
    if (block < 0 || block >= exp.coarse().num_blocks())
        throw InvalidArgument("no block " + std::to_string(block) + " (coarse grid has " +
                              std::to_string(exp.coarse().num_blocks()) + " blocks)");
    if (region < 0 || region >= exp.regions().num_regions(block))
        throw InvalidArgument("no region (" + std::to_string(block) + ", " +
                              std::to_string(region) + ")");
    const int m = exp.layers();
    Artifacts out(config.output_dir);
    const auto psi = exp.builder().build(block, region, m);
    const auto profile = basis_decay_profile(psi, exp.mesh(), exp.field(), exp.coarse());

    const std::string stem = "basis_b" + std::to_string(block) + "_r" + std::to_string(region) +
                             "_m" + std::to_string(m);
    const auto dump = out.add(stem + ".txt");
    {
        std::ostringstream head;
        head << "# owner " << block << ' ' << region << '\n'
             << "# layers " << m << '\n'
             << "# energy " << fmt("%.17g", psi.energy) << '\n'
             << "# multipliers";
        for (std::size_t k = 0; k < psi.multipliers.size(); ++k)
            head << ' ' << psi.constraint_regions[k] << ':' << fmt("%.17g", psi.multipliers[k]);
        head << '\n';
        write_text(dump, head.str());
        const auto body = out.add(stem + ".tmp");
        write_field_dump(body, exp.mesh(), psi.nodal(exp.mesh().num_nodes()));
        std::ifstream src(body, std::ios::binary);
        std::ofstream dst(dump, std::ios::binary | std::ios::app);
        dst << src.rdbuf();
        src.close();
        fs::remove(body);
    }
    std::ostringstream csv;
    csv << "ring,fraction\n";
    for (const auto& p : profile)
        csv << p.ring << ',' << fmt("%.12g", p.fraction) << '\n';
    write_text(out.add(stem + "_decay.csv"), csv.str());
    out.commit();

    std::cout << "basis (" << block << ", " << region << "), layers " << m << ", energy "
              << fmt("%.6e", psi.energy) << '\n'
              << csv.str() << "written " << dump.string() << '\n';
    return ok;
}

int cmd_validate(double perturbation)
{
    oracle::ValidateOptions opt;
    opt.stiffness_perturbation = perturbation;
    const auto results = oracle::run_validation(opt);
    oracle::print_results(std::cout, results);
    for (const auto& r : results)
        if (!r.passed)
            return solver;
    return ok;
}

template <class Fn>
int guarded(Fn&& fn)
{
    try {
        return fn();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const ConstraintDegeneracyError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return solver;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return solver;
    } catch (const UndefinedMetricError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return solver;
    } catch (const ParseError& e) {
        std::cerr << "config/data error: " << e.what() << '\n';
        return data;
    } catch (const ClassificationError& e) {
        std::cerr << "config/data error: " << e.what() << '\n';
        return data;
    } catch (const InvalidArgument& e) {
        std::cerr << "config/data error: " << e.what() << '\n';
        return data;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "config/data error: " << e.what() << '\n';
        return data;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return data;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"NLMC upscaling for 2D high-contrast elliptic problems"};
    app.require_subcommand(1);

    Overrides o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "Output directory (overrides output.dir)");
        sub->add_option("--layers", o.layers, "Oversampling layers: INT or auto");
        sub->add_option("--seed", o.seed, "Medium seed (overrides medium.seed)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
    };

    auto* solve = app.add_subcommand("solve", "Fine reference, NLMC solve and error report");
    add_common(solve);

    auto* sw = app.add_subcommand("sweep", "Error table over layers, H or contrast");
    add_common(sw);
    std::string axis, values;
    sw->add_option("--axis", axis, "layers | H | contrast")->required();
    sw->add_option("--values", values, "Comma-separated parameter values")->required();

    auto* basis = app.add_subcommand("basis", "Dump one basis function and its decay profile");
    add_common(basis);
    int block = 0, region = 0;
    basis->add_option("--block", block, "Owner block (row-major)")->required();
    basis->add_option("--region", region, "Region index within the block");

    auto* validate = app.add_subcommand("validate", "Run the built-in oracle suite");
    double perturb = 0.0;
    validate->add_option("--perturb-stiffness", perturb)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    if (*solve)
        return guarded([&] { return cmd_solve(o); });
    if (*sw)
        return guarded([&] { return cmd_sweep(o, axis, values); });
    if (*basis)
        return guarded([&] { return cmd_basis(o, block, region); });
    return guarded([&] { return cmd_validate(perturb); });
}
