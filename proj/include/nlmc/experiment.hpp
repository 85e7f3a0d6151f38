#pragma once

#include "nlmc/analysis.hpp"
#include "nlmc/basis.hpp"
#include "nlmc/config.hpp"
#include "nlmc/fem.hpp"
#include "nlmc/grid.hpp"
#include "nlmc/medium.hpp"
#include "nlmc/upscale.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace nlmc {

/// Fine mesh, medium and fine-scale reference solution; shared across sweep
/// rows that keep the medium.
struct FineReference {
    FineMesh mesh;
    CoefficientField field;
    FineOperator op;
    SparseMatrix full_stiffness;
    FineSolution solution;
    double seconds = 0.0;
};

std::shared_ptr<const FineReference> make_fine_reference(const FineMesh& mesh,
                                                         CoefficientField field,
                                                         const SourceTerm& source,
                                                         double tol = default_tolerance);

struct Timings {
    double fine = 0.0;
    double basis = 0.0;
    double coarse = 0.0;
    double total = 0.0;
};

struct ErrorReport {
    double e_L2 = 0.0;
    double e_L2_sq = 0.0;
    double e_energy = 0.0;
    double e_L2_fine = 0.0;
    /// max over regions of |mean of u_ms - ubar|
    double mean_defect = 0.0;
    double min_relative_pivot = 1.0;
    double H = 0.0;
    double h = 0.0;
    int layers = 0;
    bool low_accuracy = false;
    double contrast = 1.0;
    double region_contrast = 1.0;
    std::vector<Bin> bins;
    int total_regions = 0;
    Timings timings;
};

nlohmann::json to_json(const ErrorReport& report);

struct RunResult {
    std::vector<BasisFunction> bases;
    UpscaledSolution upscaled;
    std::vector<double> u_ms;  ///< every mesh node
    ErrorReport report;
};

/// One configured problem: fine reference plus coarse partition and regions.
class Experiment {
public:
    explicit Experiment(const ExperimentConfig& config);
    /// Reuses `reference` (mesh size and source must match the config).
    Experiment(const ExperimentConfig& config, std::shared_ptr<const FineReference> reference);

    const ExperimentConfig& config() const noexcept { return config_; }
    const FineReference& reference() const noexcept { return *reference_; }
    std::shared_ptr<const FineReference> shared_reference() const noexcept { return reference_; }
    const FineMesh& mesh() const noexcept { return reference_->mesh; }
    const CoefficientField& field() const noexcept { return reference_->field; }
    const CoarseGrid& coarse() const noexcept { return coarse_; }
    const RegionMap& regions() const noexcept { return regions_; }

    /// Explicit config layers, else the logarithmic rule.
    int layers() const;
    RunResult run() const { return run(layers()); }
    RunResult run(int layers) const;

    BasisBuilder builder() const;

private:
    ExperimentConfig config_;
    std::shared_ptr<const FineReference> reference_;
    CoarseGrid coarse_;
    RegionMap regions_;
};

enum class SweepAxis { layers, coarse, contrast };

SweepAxis parse_axis(const std::string& name);
std::string axis_name(SweepAxis axis);

struct SweepRow {
    double parameter = 0.0;  ///< m, H or contrast
    int layers = 0;
    double e_L2 = 0.0;
    double e_L2_sq = 0.0;
    double e_energy = 0.0;
    double mean_defect = 0.0;
    double seconds = 0.0;
    std::string status = "ok";
};

struct SweepTable {
    SweepAxis axis = SweepAxis::layers;
    std::vector<SweepRow> rows;  ///< ascending parameter
};

/// One upscale solve per value. For the coarse axis, values >= 1 are blocks
/// per side and values < 1 are H. A failing row keeps its error message in
/// `status` and NaN metrics; the sweep continues.
SweepTable sweep(const ExperimentConfig& config, SweepAxis axis, std::vector<double> values);

std::string sweep_csv(const SweepTable& table);
void write_sweep_csv(const std::filesystem::path& path, const SweepTable& table);

} // namespace nlmc
