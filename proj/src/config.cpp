#include "nlmc/config.hpp"

#include "nlmc/errors.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

namespace nlmc {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where)
{
    if (!j.is_object())
        throw ParseError(where + " must be an object", 0);
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw ParseError("unknown key '" + key + "' in " + where, 0);
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where)
{
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(where + "." + key + ": " + e.what(), 0);
    }
}

json shape_to_json(const Shape& s)
{
    if (const auto* r = std::get_if<Rect>(&s))
        return {{"rect", {r->x0, r->y0, r->x1, r->y1}}};
    const auto& p = std::get<Polyline>(s);
    json pts = json::array();
    for (const auto& q : p.points)
        pts.push_back({q.x, q.y});
    return {{"polyline", pts}, {"width", p.width}};
}

Shape shape_from_json(const json& j)
{
    try {
        if (j.contains("rect")) {
            reject_unknown(j, {"rect"}, "shape");
            const auto v = j.at("rect").get<std::vector<double>>();
            if (v.size() != 4)
                throw ParseError("rect needs [x0, y0, x1, y1]", 0);
            return Rect{v[0], v[1], v[2], v[3]};
        }
        reject_unknown(j, {"polyline", "width"}, "shape");
        Polyline p;
        for (const auto& q : j.at("polyline")) {
            const auto v = q.get<std::vector<double>>();
            if (v.size() != 2)
                throw ParseError("polyline points are [x, y] pairs", 0);
            p.points.push_back({v[0], v[1]});
        }
        p.width = j.at("width").get<double>();
        return p;
    } catch (const json::exception& e) {
        throw ParseError(std::string("shape: ") + e.what(), 0);
    }
}

json shapes_to_json(const std::vector<Shape>& shapes)
{
    json a = json::array();
    for (const auto& s : shapes)
        a.push_back(shape_to_json(s));
    return a;
}

std::vector<Shape> shapes_from_json(const json& j, const char* key)
{
    std::vector<Shape> out;
    if (!j.contains(key))
        return out;
    if (!j.at(key).is_array())
        throw ParseError(std::string("medium.") + key + " must be an array", 0);
    for (const auto& s : j.at(key))
        out.push_back(shape_from_json(s));
    return out;
}

json medium_to_json(const MediumConfig& m)
{
    json j = {{"type", m.type}};
    if (m.type == "constant")
        j["value"] = m.value;
    else if (m.type == "file")
        j["path"] = m.path;
    else if (m.type == "channels") {
        j["background"] = m.background;
        j["contrast"] = m.contrast;
        j["shapes"] = shapes_to_json(m.shapes);
        j["random_channels"] = m.random_channels;
        j["random_inclusions"] = m.random_inclusions;
        j["seed"] = m.seed;
    } else {
        j["background_lo"] = m.background_lo;
        j["background_hi"] = m.background_hi;
        j["mid"] = m.mid;
        j["high"] = m.high;
        j["mid_shapes"] = shapes_to_json(m.mid_shapes);
        j["high_shapes"] = shapes_to_json(m.high_shapes);
        j["random_channels"] = m.random_channels;
        j["random_inclusions"] = m.random_inclusions;
        j["seed"] = m.seed;
    }
    return j;
}

MediumConfig medium_from_json(const json& j)
{
    MediumConfig m;
    read(j, "type", m.type, "medium");
    if (m.type == "constant") {
        reject_unknown(j, {"type", "value"}, "medium");
        read(j, "value", m.value, "medium");
    } else if (m.type == "file") {
        reject_unknown(j, {"type", "path"}, "medium");
        read(j, "path", m.path, "medium");
        if (m.path.empty())
            throw ParseError("medium.path is required for a file medium", 0);
    } else if (m.type == "channels") {
        reject_unknown(j, {"type", "background", "contrast", "shapes", "random_channels",
                           "random_inclusions", "seed"},
                       "medium");
        read(j, "background", m.background, "medium");
        read(j, "contrast", m.contrast, "medium");
        m.shapes = shapes_from_json(j, "shapes");
        read(j, "random_channels", m.random_channels, "medium");
        read(j, "random_inclusions", m.random_inclusions, "medium");
        read(j, "seed", m.seed, "medium");
    } else if (m.type == "three_continuum") {
        reject_unknown(j, {"type", "background_lo", "background_hi", "mid", "high", "mid_shapes",
                           "high_shapes", "random_channels", "random_inclusions", "seed"},
                       "medium");
        read(j, "background_lo", m.background_lo, "medium");
        read(j, "background_hi", m.background_hi, "medium");
        read(j, "mid", m.mid, "medium");
        read(j, "high", m.high, "medium");
        m.mid_shapes = shapes_from_json(j, "mid_shapes");
        m.high_shapes = shapes_from_json(j, "high_shapes");
        read(j, "random_channels", m.random_channels, "medium");
        read(j, "random_inclusions", m.random_inclusions, "medium");
        read(j, "seed", m.seed, "medium");
    } else {
        throw ParseError("unknown medium type '" + m.type + "'", 0);
    }
    return m;
}

} // namespace

json to_json(const ExperimentConfig& c)
{
    json j;
    j["mesh"] = {{"fine", c.fine}, {"coarse", c.coarse}};
    j["layers"] = c.layers ? json(*c.layers) : json("auto");
    j["layers_offset"] = c.layers_offset;
    j["medium"] = medium_to_json(c.medium);
    json bins = json::array();
    for (const auto& b : c.bins)
        bins.push_back({b.lo, b.hi});
    j["bins"] = bins;
    j["split_components"] = c.split_components;
    if (const auto* s = std::get_if<ConstantSource>(&c.source))
        j["source"] = {{"type", "constant"}, {"value", s->value}};
    else {
        const auto& s2 = std::get<IndicatorSource>(c.source);
        j["source"] = {{"type", "indicator"}, {"x0", s2.x0}, {"y0", s2.y0},
                       {"x1", s2.x1},         {"y1", s2.y1}, {"value", s2.value}};
    }
    j["solver"] = {{"tolerance", c.tolerance}, {"threads", c.threads}};
    j["output"] = {{"dir", c.output_dir}, {"timings", c.record_timings}};
    return j;
}

ExperimentConfig config_from_json(const json& j)
{
    reject_unknown(j, {"mesh", "layers", "layers_offset", "medium", "bins", "split_components",
                       "source", "solver", "output"},
                   "config");
    ExperimentConfig c;
    if (j.contains("mesh")) {
        const auto& m = j.at("mesh");
        reject_unknown(m, {"fine", "coarse"}, "mesh");
        read(m, "fine", c.fine, "mesh");
        read(m, "coarse", c.coarse, "mesh");
    }
    if (j.contains("layers")) {
        const auto& l = j.at("layers");
        if (l.is_string()) {
            if (l.get<std::string>() != "auto")
                throw ParseError("layers must be an integer or \"auto\"", 0);
            c.layers.reset();
        } else if (l.is_number_integer()) {
            c.layers = l.get<int>();
        } else {
            throw ParseError("layers must be an integer or \"auto\"", 0);
        }
    }
    read(j, "layers_offset", c.layers_offset, "config");
    if (j.contains("medium"))
        c.medium = medium_from_json(j.at("medium"));
    if (j.contains("bins")) {
        c.bins.clear();
        try {
            for (const auto& b : j.at("bins")) {
                const auto v = b.get<std::vector<double>>();
                if (v.size() != 2)
                    throw ParseError("each bin is [lo, hi]", 0);
                c.bins.push_back({v[0], v[1]});
            }
        } catch (const json::exception& e) {
            throw ParseError(std::string("bins: ") + e.what(), 0);
        }
    }
    read(j, "split_components", c.split_components, "config");
    if (j.contains("source")) {
        const auto& s = j.at("source");
        std::string type = "constant";
        read(s, "type", type, "source");
        if (type == "constant") {
            reject_unknown(s, {"type", "value"}, "source");
            ConstantSource cs;
            read(s, "value", cs.value, "source");
            c.source = cs;
        } else if (type == "indicator") {
            reject_unknown(s, {"type", "x0", "y0", "x1", "y1", "value"}, "source");
            IndicatorSource is;
            read(s, "x0", is.x0, "source");
            read(s, "y0", is.y0, "source");
            read(s, "x1", is.x1, "source");
            read(s, "y1", is.y1, "source");
            read(s, "value", is.value, "source");
            c.source = is;
        } else {
            throw ParseError("unknown source type '" + type + "'", 0);
        }
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        reject_unknown(s, {"tolerance", "threads"}, "solver");
        read(s, "tolerance", c.tolerance, "solver");
        read(s, "threads", c.threads, "solver");
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        reject_unknown(o, {"dir", "timings"}, "output");
        read(o, "dir", c.output_dir, "output");
        read(o, "timings", c.record_timings, "output");
    }

    if (c.fine < 1 || c.coarse < 1)
        throw ParseError("mesh sizes must be positive", 0);
    if (c.fine % c.coarse != 0)
        throw ParseError("mesh.coarse (" + std::to_string(c.coarse) + ") must divide mesh.fine (" +
                             std::to_string(c.fine) + ")",
                         0);
    if (c.layers && *c.layers < 0)
        throw ParseError("layers must be non-negative", 0);
    if (!(c.tolerance > 0))
        throw ParseError("solver.tolerance must be positive", 0);
    if (c.threads < 1)
        throw ParseError("solver.threads must be at least 1", 0);
    try {
        ContrastBins{c.bins};
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("bins: ") + e.what(), 0);
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open config '" + path.string() + "'", 0);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("config '" + path.string() + "': " + e.what(), 0);
    }
    return config_from_json(j);
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& config)
{
    std::ofstream out(path);
    if (!out)
        throw InvalidArgument("cannot write config '" + path.string() + "'");
    out << to_json(config).dump(2) << '\n';
}

CoefficientField build_medium(const MediumConfig& m, int n_side)
{
    if (m.type == "constant")
        return constant_medium(n_side, m.value);
    if (m.type == "file")
        return load_medium(m.path, n_side);
    if (m.type == "channels") {
        ChannelSpec spec;
        spec.shapes = m.shapes;
        spec.random_channels = m.random_channels;
        spec.random_inclusions = m.random_inclusions;
        spec.seed = m.seed;
        return generate_channel_medium(n_side, m.background, m.background * m.contrast, spec);
    }
    if (m.type == "three_continuum") {
        ThreeContinuumSpec spec;
        spec.background_lo = m.background_lo;
        spec.background_hi = m.background_hi;
        spec.mid = m.mid;
        spec.high = m.high;
        spec.mid_shapes = expand_shapes({m.mid_shapes, m.random_channels, 0, m.seed});
        spec.high_shapes = expand_shapes({m.high_shapes, 0, m.random_inclusions, m.seed + 1});
        spec.seed = m.seed;
        return generate_three_continuum_medium(n_side, spec);
    }
    throw InvalidArgument("unknown medium type '" + m.type + "'");
}

} // namespace nlmc
