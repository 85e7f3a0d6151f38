#include "doctest.h"

#include "nlmc/config.hpp"
#include "nlmc/errors.hpp"

#include <filesystem>
#include <fstream>

using namespace nlmc;
using nlohmann::json;

TEST_CASE("default config round trips through JSON")
{
    const ExperimentConfig def;
    CHECK(config_from_json(to_json(def)) == def);
    CHECK(config_from_json(json::object()) == def);
}

TEST_CASE("non-default config round trips through a file")
{
    ExperimentConfig c;
    c.fine = 40;
    c.coarse = 5;
    c.layers = std::nullopt;
    c.layers_offset = 1;
    c.medium.type = "three_continuum";
    c.medium.mid_shapes = {Rect{0.1, 0.2, 0.3, 0.4}};
    c.medium.high_shapes = {Polyline{{{0.0, 0.5}, {1.0, 0.6}}, 0.05}};
    c.medium.seed = 99;
    c.bins = {{0.5, 20}, {500, 5000}, {6000, 1e12}};
    c.split_components = true;
    c.source = IndicatorSource{0.0, 0.0, 0.25, 0.25, 2.0};
    c.tolerance = 1e-9;
    c.threads = 3;
    c.record_timings = false;
    const auto path = std::filesystem::temp_directory_path() / "nlmc_test_config.json";
    save_config(path, c);
    CHECK(load_config(path) == c);
}

TEST_CASE("layers accept auto")
{
    const auto c = config_from_json(json::parse(R"({"layers": "auto", "layers_offset": 3})"));
    CHECK_FALSE(c.layers.has_value());
    CHECK(c.layers_offset == 3);
    CHECK(config_from_json(json::parse(R"({"layers": 5})")).layers == 5);
}

TEST_CASE("invalid configs raise parse errors")
{
    const char* bad[] = {
        R"({"mesh": {"fine": 10, "coarse": 4}})",
        R"({"layers": -1})",
        R"({"layers": "many"})",
        R"({"solver": {"tolerance": 0}})",
        R"({"solver": {"threads": 0}})",
        R"({"bins": [[5, 1]]})",
        R"({"bins": [[1, 5], [4, 9]]})",
        R"({"medium": {"type": "marble"}})",
        R"({"medium": {"type": "file"}})",
        R"({"medium": {"type": "channels", "shapes": [{"rect": [0, 0, 1]}]}})",
        R"({"source": {"type": "gaussian"}})",
        R"({"mesh": {"fine": "big"}})",
        R"({"colour": "red"})",
        R"([1, 2])",
    };
    for (const char* text : bad) {
        CAPTURE(text);
        CHECK_THROWS_AS(config_from_json(json::parse(text)), ParseError);
    }
    CHECK_THROWS_WITH_AS(config_from_json(json::parse(R"({"mesh": {"fine": 10, "coarse": 4}})")),
                         "mesh.coarse (4) must divide mesh.fine (10)", ParseError);
}

TEST_CASE("unreadable config files")
{
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ParseError);
    const auto path = std::filesystem::temp_directory_path() / "nlmc_test_broken.json";
    std::ofstream(path) << "{\"mesh\": ";
    CHECK_THROWS_AS(load_config(path), ParseError);
}

TEST_CASE("media built from configs")
{
    MediumConfig m;
    m.type = "constant";
    m.value = 3.0;
    const auto f = build_medium(m, 4);
    CHECK(f.kappa_min() == 3.0);
    CHECK(f.kappa_max() == 3.0);

    MediumConfig ch;
    ch.background = 2.0;
    ch.contrast = 50.0;
    const auto g = build_medium(ch, 32);
    CHECK(g.kappa_min() == 2.0);
    CHECK(g.kappa_max() == 100.0);
    CHECK(build_medium(ch, 32).values() == g.values());
    ch.seed = 2;
    CHECK(build_medium(ch, 32).values() != g.values());
}
