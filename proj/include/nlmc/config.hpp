#pragma once

#include "nlmc/fem.hpp"
#include "nlmc/medium.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nlmc {

/// Where the coefficient comes from.
///
/// type "constant":        value
/// type "file":            path (medium file format)
/// type "channels":        background, contrast (channel = background * contrast),
///                         shapes, random_channels, random_inclusions, seed
/// type "three_continuum": background_lo/hi, mid, high, mid_shapes, high_shapes,
///                         random_channels (painted mid), random_inclusions (painted high), seed
struct MediumConfig {
    std::string type = "channels";
    std::string path;
    double value = 1.0;
    double background = 1.0;
    double contrast = 1e4;
    std::vector<Shape> shapes;
    double background_lo = 1.0;
    double background_hi = 10.0;
    double mid = 1e3;
    double high = 1e4;
    std::vector<Shape> mid_shapes;
    std::vector<Shape> high_shapes;
    int random_channels = 6;
    int random_inclusions = 12;
    std::uint64_t seed = 1;

    bool operator==(const MediumConfig&) const = default;
};

struct ExperimentConfig {
    int fine = 64;
    int coarse = 8;
    std::optional<int> layers = 3;  ///< nullopt selects auto_layers
    int layers_offset = 2;
    MediumConfig medium;
    std::vector<Bin> bins{{0.5, 20.0}, {50.0, 1e12}};
    bool split_components = false;
    SourceTerm source = ConstantSource{1.0};
    double tolerance = 1e-10;
    int threads = 1;
    std::string output_dir = "nlmc_out";
    bool record_timings = true;  ///< false writes 0 seconds so CSV output is byte-stable

    bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults; unknown keys and bad values raise ParseError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& config);

CoefficientField build_medium(const MediumConfig& medium, int n_side);

} // namespace nlmc
