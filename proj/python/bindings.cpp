#include "nlmc/analysis.hpp"
#include "nlmc/basis.hpp"
#include "nlmc/config.hpp"
#include "nlmc/errors.hpp"
#include "nlmc/experiment.hpp"
#include "nlmc/oracles.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace nlmc;

namespace {

// Configs cross the boundary as JSON text; the Python side wraps them in dicts.
ExperimentConfig parse(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what(), 0);
    }
    return config_from_json(j);
}

py::array_t<double> array(const std::vector<double>& v)
{
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<double> grid(const std::vector<double>& nodal, int n_side)
{
    const py::ssize_t np = n_side + 1;
    py::array_t<double> out({np, np});
    std::copy(nodal.begin(), nodal.end(), out.mutable_data());
    return out;
}

py::dict solve(const std::string& config_json, std::optional<int> layers)
{
    const auto config = parse(config_json);
    std::optional<Experiment> exp;
    RunResult res;
    {
        py::gil_scoped_release release;
        exp.emplace(config);
        res = exp->run(layers ? *layers : exp->layers());
    }
    const int n = exp->mesh().n_side();
    py::dict d;
    d["report"] = to_json(res.report).dump();
    d["fine_solution"] = grid(exp->reference().solution.values, n);
    d["u_ms"] = grid(res.u_ms, n);
    d["ubar"] = array(res.upscaled.ubar);
    std::vector<int> block, local;
    for (const auto& r : exp->regions().regions()) {
        block.push_back(r.block);
        local.push_back(r.local);
    }
    d["region_block"] = block;
    d["region_local"] = local;
    return d;
}

py::dict sweep_table(const std::string& config_json, const std::string& axis,
                     const std::vector<double>& values)
{
    const auto config = parse(config_json);
    const auto ax = parse_axis(axis);
    SweepTable t;
    {
        py::gil_scoped_release release;
        t = sweep(config, ax, values);
    }
    py::list rows;
    for (const auto& r : t.rows) {
        py::dict row;
        row["parameter"] = r.parameter;
        row["layers"] = r.layers;
        row["e_L2"] = r.e_L2;
        row["e_L2_sq"] = r.e_L2_sq;
        row["e_energy"] = r.e_energy;
        row["seconds"] = r.seconds;
        row["status"] = r.status;
        rows.append(row);
    }
    py::dict d;
    d["axis"] = axis_name(t.axis);
    d["rows"] = rows;
    d["csv"] = sweep_csv(t);
    return d;
}

py::dict basis(const std::string& config_json, int block, int region, std::optional<int> layers)
{
    const auto config = parse(config_json);
    std::optional<Experiment> exp;
    BasisFunction psi;
    std::vector<DecayPoint> profile;
    {
        py::gil_scoped_release release;
        exp.emplace(config);
        const int m = layers ? *layers : exp->layers();
        psi = exp->builder().build(block, region, m);
        profile = basis_decay_profile(psi, exp->mesh(), exp->field(), exp->coarse());
    }
    py::dict d;
    d["block"] = psi.block;
    d["region"] = psi.region;
    d["layers"] = psi.layers;
    d["energy"] = psi.energy;
    d["values"] = grid(psi.nodal(exp->mesh().num_nodes()), exp->mesh().n_side());
    d["constraint_regions"] = psi.constraint_regions;
    d["multipliers"] = array(psi.multipliers);
    std::vector<double> frac;
    for (const auto& p : profile)
        frac.push_back(p.fraction);
    d["decay"] = array(frac);
    return d;
}

py::list validate(double perturbation)
{
    oracle::ValidateOptions opt;
    opt.stiffness_perturbation = perturbation;
    std::vector<oracle::CheckResult> results;
    {
        py::gil_scoped_release release;
        results = oracle::run_validation(opt);
    }
    py::list out;
    for (const auto& r : results) {
        py::dict d;
        d["name"] = r.name;
        d["passed"] = r.passed;
        d["value"] = r.value;
        d["tolerance"] = r.tolerance;
        d["detail"] = r.detail;
        out.append(d);
    }
    return out;
}

py::array_t<double> medium(const std::string& config_json)
{
    const auto config = parse(config_json);
    const auto field = build_medium(config.medium, config.fine);
    const py::ssize_t n = field.n_side();
    py::array_t<double> out({n, n});
    std::copy(field.values().begin(), field.values().end(), out.mutable_data());
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "NLMC upscaling core";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<ClassificationError>(m, "ClassificationError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", PyExc_ArithmeticError);

    m.def("default_config", [] { return to_json(ExperimentConfig{}).dump(); });
    m.def("normalize_config", [](const std::string& s) { return to_json(parse(s)).dump(); },
          "Parse, validate and re-serialize a JSON config.");
    m.def("solve", &solve, py::arg("config"), py::arg("layers") = py::none());
    m.def("sweep", &sweep_table, py::arg("config"), py::arg("axis"), py::arg("values"));
    m.def("basis", &basis, py::arg("config"), py::arg("block"), py::arg("region") = 0,
          py::arg("layers") = py::none());
    m.def("validate", &validate, py::arg("perturbation") = 0.0);
    m.def("medium", &medium, py::arg("config"), "Cell coefficients, shape (n, n), row y.");
    m.def("auto_layers", &auto_layers, py::arg("kappa_max"), py::arg("H"), py::arg("offset") = 2);
    m.def("poisson_series", &oracle::poisson_series, py::arg("x"), py::arg("y"),
          py::arg("terms") = 400);
    m.def(
        "relative_l2_error",
        [](const std::vector<double>& f, const std::vector<double>& ms,
           const std::vector<double>& areas) {
            const auto e = relative_L2_error(f, ms, areas);
            return py::make_tuple(e.value, e.squared);
        },
        py::arg("ubar_f"), py::arg("ubar_ms"), py::arg("areas"));
}
