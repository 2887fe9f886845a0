#pragma once

// Experiment configuration: an INI-style file of `key = value` lines
// grouped under [section] headers. Vertex lists are semicolon-separated
// `x,y` pairs; direction atoms are semicolon-separated `theta,weight`
// pairs (radians).
//
//   [window]       vertices
//   [measure]      iso_weight, atoms, scale
//   [run]          mode, time_t, time_s, replications, master_seed,
//                  output_dir, snapshot_times
//   [restriction]  subwindow
//   [lifetime]     subset

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mecke/geometry.hpp"
#include "mecke/line_measure.hpp"

namespace mecke {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    ConvexPolygon window = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0);
    MeasureSpec measure = MeasureSpec::isotropic();
    double time_t = 1.0;
    std::optional<double> time_s;  // iteration only
    std::size_t replications = 1000;
    std::uint64_t master_seed = 20240917;
    std::optional<ConvexPolygon> subwindow;
    std::optional<ConvexPolygon> subset;
    std::string output_dir = ".";
    std::string mode;
    std::vector<double> snapshot_times;  // empty: time_t only
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_real(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    }
}

inline std::uint64_t parse_natural(const std::string& key, const std::string& text) {
    try {
        if (text.empty() || text.front() == '-') throw std::invalid_argument(text);
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
    }
}

inline std::vector<std::pair<double, double>> parse_pairs(const std::string& key, const std::string& text) {
    std::vector<std::pair<double, double>> out;
    for (const auto& item : split_list(text, ';')) {
        const auto xy = split_list(item, ',');
        if (xy.size() != 2) throw ConfigError(key + ": expected 'a,b' pairs, got '" + item + "'");
        out.emplace_back(parse_real(key, xy[0]), parse_real(key, xy[1]));
    }
    return out;
}

inline ConvexPolygon parse_polygon(const std::string& key, const std::string& text) {
    std::vector<Point2> v;
    for (const auto& [x, y] : parse_pairs(key, text)) v.push_back({x, y});
    try {
        return ConvexPolygon(std::move(v));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    static const std::map<std::string, std::set<std::string>> known = {
        {"window", {"vertices"}},
        {"measure", {"iso_weight", "atoms", "scale"}},
        {"run", {"mode", "time_t", "time_s", "replications", "master_seed", "output_dir", "snapshot_times"}},
        {"restriction", {"subwindow"}},
        {"lifetime", {"subset"}},
    };
    std::map<std::string, std::string> values;
    for (const auto& [section, body] : tree) {
        const auto it = known.find(section);
        if (it == known.end()) {
            if (!body.data().empty()) throw ConfigError("key outside of any section: " + section);
            throw ConfigError("unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
            values[section + "." + key] = detail::trim(value.data());
        }
    }
    auto get = [&](const std::string& k) -> std::optional<std::string> {
        const auto it = values.find(k);
        if (it == values.end()) return std::nullopt;
        return it->second;
    };

    ExperimentConfig cfg;
    if (auto v = get("window.vertices")) cfg.window = detail::parse_polygon("window.vertices", *v);

    double iso = 1.0, scale = 1.0;
    std::vector<DirectionAtom> atoms;
    if (auto v = get("measure.iso_weight")) iso = detail::parse_real("measure.iso_weight", *v);
    if (auto v = get("measure.scale")) scale = detail::parse_real("measure.scale", *v);
    if (auto v = get("measure.atoms")) {
        for (const auto& [theta, w] : detail::parse_pairs("measure.atoms", *v)) atoms.push_back({theta, w});
    }
    try {
        cfg.measure = MeasureSpec(iso, std::move(atoms), scale);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("measure: ") + e.what());
    }

    if (auto v = get("run.mode")) cfg.mode = *v;
    if (auto v = get("run.time_t")) cfg.time_t = detail::parse_real("run.time_t", *v);
    if (auto v = get("run.time_s")) cfg.time_s = detail::parse_real("run.time_s", *v);
    if (auto v = get("run.replications")) cfg.replications = detail::parse_natural("run.replications", *v);
    if (auto v = get("run.master_seed")) cfg.master_seed = detail::parse_natural("run.master_seed", *v);
    if (auto v = get("run.output_dir")) cfg.output_dir = *v;
    if (auto v = get("run.snapshot_times")) {
        for (const auto& item : detail::split_list(*v, ';')) {
            cfg.snapshot_times.push_back(detail::parse_real("run.snapshot_times", item));
        }
    }
    if (auto v = get("restriction.subwindow")) cfg.subwindow = detail::parse_polygon("restriction.subwindow", *v);
    if (auto v = get("lifetime.subset")) cfg.subset = detail::parse_polygon("lifetime.subset", *v);

    if (!(cfg.time_t >= 0.0)) throw ConfigError("run.time_t must be >= 0");
    if (cfg.time_s && !(*cfg.time_s >= 0.0)) throw ConfigError("run.time_s must be >= 0");
    if (cfg.replications < 1) throw ConfigError("run.replications must be >= 1");
    for (double t : cfg.snapshot_times) {
        if (!(t >= 0.0)) throw ConfigError("run.snapshot_times must be >= 0");
    }
    const double eps = cfg.window.window_tolerance().length;
    if (cfg.subwindow && !contains(cfg.window, *cfg.subwindow, eps)) {
        throw ConfigError("restriction.subwindow is not contained in the window");
    }
    if (cfg.subset && !contains(cfg.window, *cfg.subset, eps)) {
        throw ConfigError("lifetime.subset is not contained in the window");
    }
    return cfg;
}

inline ExperimentConfig parse_config(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

}  // namespace mecke
