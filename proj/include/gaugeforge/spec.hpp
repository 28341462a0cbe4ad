/**
 * @file spec.hpp
 * @brief Metric specifications: the JSON document format, validation with
 *        error paths, the built-in catalog, and materialisation into charts
 *        and fields.
 *
 * A spec gives either a metric grid (with an optional background metric on
 * the same chart) or a distortion field h over a Lorentz chart. Example:
 *
 *   {
 *     "name": "schwarzschild",
 *     "coordinates": ["t", "r", "theta", "phi"],
 *     "constants": {"m": 1},
 *     "metric": [["1-2*m/r", "0", "0", "0"],
 *                ["", "-1/(1-2*m/r)", "0", "0"],
 *                ["", "", "-r^2", "0"],
 *                ["", "", "", "-r^2*sin(theta)^2"]],
 *     "background": {"metric": [...]},
 *     "sample": {"ranges": [[-10, 10], [4, 100], [0.2, 2.94], [0, 6.2]],
 *                "points": 20, "seed": 1},
 *     "excluded": ["r-2*m"]
 *   }
 */
#pragma once

#include <gaugeforge/connection.hpp>
#include <gaugeforge/distortion.hpp>
#include <gaugeforge/expr.hpp>
#include <gaugeforge/gauge.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaugeforge {

/// Validation failure with a JSON-pointer-like path to the offending field.
class SpecError : public std::runtime_error {
public:
    SpecError(std::string path, const std::string& msg) : std::runtime_error(path + ": " + msg), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct SampleSpec {
    std::array<CoordinateChart::Interval, kDim> ranges{};
    int points = 20;
    std::uint64_t seed = 1;
};

struct MetricSpec {
    std::string name;
    std::array<std::string, kDim> coordinates{};
    std::map<std::string, double> constants;
    std::optional<ExprGrid> metric;
    std::optional<ExprGrid> background;
    std::optional<ExprGrid> h_field;
    SampleSpec sample;
    std::vector<std::string> excluded;

    bool distortion_mode() const { return h_field.has_value(); }

    ConstantMap constant_map() const { return ConstantMap(constants.begin(), constants.end()); }

    double constant_or(const std::string& k, double fallback) const {
        const auto it = constants.find(k);
        return it == constants.end() ? fallback : it->second;
    }
};

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline ExprGrid grid_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array() || j.size() != kDim) throw SpecError(path, "expected a 4x4 array of expression strings");
    ExprGrid g;
    for (int i = 0; i < kDim; ++i) {
        const auto& row = j[i];
        const std::string rp = path + "/" + std::to_string(i);
        if (!row.is_array() || row.size() != kDim) throw SpecError(rp, "expected 4 entries");
        for (int k = 0; k < kDim; ++k) {
            const auto& e = row[k];
            if (e.is_string()) g[i][k] = e.get<std::string>();
            else if (e.is_number()) g[i][k] = format_coefficient(e.get<double>());
            else if (e.is_null()) g[i][k] = "";
            else throw SpecError(rp + "/" + std::to_string(k), "expected an expression string");
        }
    }
    return g;
}

inline nlohmann::json grid_to_json(const ExprGrid& g) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& row : g) j.push_back(nlohmann::json(std::vector<std::string>(row.begin(), row.end())));
    return j;
}

}  // namespace detail

inline MetricSpec spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SpecError("", "spec must be an object");
    MetricSpec s;
    s.name = j.value("name", std::string("unnamed"));

    if (!j.contains("coordinates")) throw SpecError("/coordinates", "missing");
    const auto& c = j.at("coordinates");
    if (!c.is_array() || c.size() != kDim) throw SpecError("/coordinates", "expected 4 coordinate names");
    for (int a = 0; a < kDim; ++a) {
        if (!c[a].is_string()) throw SpecError("/coordinates/" + std::to_string(a), "expected a string");
        s.coordinates[a] = c[a].get<std::string>();
    }

    if (j.contains("constants")) {
        const auto& k = j.at("constants");
        if (!k.is_object()) throw SpecError("/constants", "expected an object of numbers");
        for (const auto& [name, v] : k.items()) {
            if (!v.is_number()) throw SpecError("/constants/" + name, "expected a number");
            s.constants[name] = v.get<double>();
        }
    }

    const bool has_metric = j.contains("metric"), has_h = j.contains("h_field");
    if (has_metric == has_h) throw SpecError("", "exactly one of 'metric' and 'h_field' must be present");
    if (has_metric) s.metric = detail::grid_from_json(j.at("metric"), "/metric");
    if (has_h) s.h_field = detail::grid_from_json(j.at("h_field"), "/h_field");
    if (j.contains("background")) {
        if (has_h) throw SpecError("/background", "a distortion-field spec always uses the Minkowski background");
        const auto& b = j.at("background");
        if (!b.is_object() || !b.contains("metric")) throw SpecError("/background", "expected an object with 'metric'");
        s.background = detail::grid_from_json(b.at("metric"), "/background/metric");
    }

    if (!j.contains("sample")) throw SpecError("/sample", "missing");
    const auto& smp = j.at("sample");
    if (!smp.contains("ranges")) throw SpecError("/sample/ranges", "missing");
    const auto& r = smp.at("ranges");
    if (!r.is_array() || r.size() != kDim) throw SpecError("/sample/ranges", "expected 4 [lo, hi] pairs");
    for (int a = 0; a < kDim; ++a) {
        const std::string rp = "/sample/ranges/" + std::to_string(a);
        if (!r[a].is_array() || r[a].size() != 2 || !r[a][0].is_number() || !r[a][1].is_number())
            throw SpecError(rp, "expected [lo, hi]");
        s.sample.ranges[a] = {r[a][0].get<double>(), r[a][1].get<double>()};
        if (!(s.sample.ranges[a].second > s.sample.ranges[a].first)) throw SpecError(rp, "empty interval");
    }
    if (smp.contains("points")) {
        if (!smp.at("points").is_number_integer() || smp.at("points").get<int>() < 1)
            throw SpecError("/sample/points", "expected a positive integer");
        s.sample.points = smp.at("points").get<int>();
    }
    if (smp.contains("seed")) {
        if (!smp.at("seed").is_number_unsigned()) throw SpecError("/sample/seed", "expected a non-negative integer");
        s.sample.seed = smp.at("seed").get<std::uint64_t>();
    }

    if (j.contains("excluded")) {
        const auto& e = j.at("excluded");
        if (!e.is_array()) throw SpecError("/excluded", "expected an array of expression strings");
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (!e[i].is_string()) throw SpecError("/excluded/" + std::to_string(i), "expected a string");
            s.excluded.push_back(e[i].get<std::string>());
        }
    }
    return s;
}

inline nlohmann::json spec_to_json(const MetricSpec& s) {
    nlohmann::json j;
    j["name"] = s.name;
    j["coordinates"] = std::vector<std::string>(s.coordinates.begin(), s.coordinates.end());
    j["constants"] = nlohmann::json::object();
    for (const auto& [k, v] : s.constants) j["constants"][k] = v;
    if (s.metric) j["metric"] = detail::grid_to_json(*s.metric);
    if (s.background) j["background"] = {{"metric", detail::grid_to_json(*s.background)}};
    if (s.h_field) j["h_field"] = detail::grid_to_json(*s.h_field);
    nlohmann::json ranges = nlohmann::json::array();
    for (const auto& r : s.sample.ranges) ranges.push_back({r.first, r.second});
    j["sample"] = {{"ranges", ranges}, {"points", s.sample.points}, {"seed", s.sample.seed}};
    if (!s.excluded.empty()) j["excluded"] = s.excluded;
    return j;
}

inline MetricSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError(path, "cannot open file");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError(path, std::string("malformed JSON: ") + e.what());
    }
    return spec_from_json(j);
}

// ---------------------------------------------------------------------------
// Materialised fields

/// Chart and fields built from a spec; every expression parsed once.
struct SpecFields {
    std::shared_ptr<CoordinateChart> chart;
    std::optional<MetricField> metric;      // effective metric in distortion mode
    std::optional<MetricField> background;  // Minkowski in distortion mode
    std::optional<DistortionField> h;
};

namespace detail {

inline ExprGrid diagonal_grid(const std::array<std::string, kDim>& d) {
    ExprGrid g;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) g[i][j] = i == j ? d[i] : (j > i ? "0" : "");
    return g;
}

template <class F>
auto with_path(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw SpecError(path, e.what());
    } catch (const std::invalid_argument& e) {
        throw SpecError(path, e.what());
    }
}

}  // namespace detail

inline SpecFields materialize(const MetricSpec& s) {
    SpecFields f;
    const ConstantMap k = s.constant_map();
    f.chart = detail::with_path("/coordinates",
                                [&] { return std::make_shared<CoordinateChart>(s.coordinates, s.sample.ranges); });
    for (std::size_t i = 0; i < s.excluded.size(); ++i)
        detail::with_path("/excluded/" + std::to_string(i), [&] {
            add_excluded_locus(*f.chart, s.excluded[i], k);
            return 0;
        });
    if (s.h_field) {
        f.h = detail::with_path("/h_field", [&] { return DistortionField::parse(f.chart, *s.h_field, k); });
        f.metric = detail::with_path("/h_field", [&] { return effective_metric_field(*f.h, *s.h_field, k); });
        f.background = MetricField::parse(f.chart, detail::diagonal_grid({"1", "-1", "-1", "-1"}));
    } else {
        f.metric = detail::with_path("/metric", [&] { return MetricField::parse(f.chart, *s.metric, k); });
        if (s.background)
            f.background = detail::with_path("/background/metric", [&] { return MetricField::parse(f.chart, *s.background, k); });
    }
    return f;
}

// ---------------------------------------------------------------------------
// Catalog

namespace detail {

inline MetricSpec spherical_base(std::string name, std::map<std::string, double> constants, double rmin, double rmax) {
    MetricSpec s;
    s.name = std::move(name);
    s.coordinates = {"t", "r", "theta", "phi"};
    s.constants = std::move(constants);
    s.sample.ranges = {{{-10.0, 10.0}, {rmin, rmax}, {0.2, std::acos(-1.0) - 0.2}, {0.0, 6.2}}};
    s.excluded = {"sin(theta)"};
    return s;
}

inline MetricSpec cartesian_base(std::string name, double half_width = 1.0) {
    MetricSpec s;
    s.name = std::move(name);
    s.coordinates = {"t", "x", "y", "z"};
    for (auto& r : s.sample.ranges) r = {-half_width, half_width};
    return s;
}

inline ExprGrid flat_spherical_grid() { return diagonal_grid({"1", "-1", "-r^2", "-r^2*sin(theta)^2"}); }
inline ExprGrid minkowski_grid() { return diagonal_grid({"1", "-1", "-1", "-1"}); }

inline MetricSpec distortion_base(std::string name, ExprGrid h) {
    MetricSpec s = cartesian_base(std::move(name), 0.5);
    s.constants = {{"mass", 0.5}, {"kappa_L", 1.0}};
    s.h_field = std::move(h);
    return s;
}

inline ExprGrid single_entry(int a, int b, const std::string& e) {
    ExprGrid g{};
    g[a][b] = e;
    return g;
}

}  // namespace detail

struct CatalogEntry {
    std::string name;
    std::string summary;
};

inline std::vector<CatalogEntry> catalog_list() {
    return {
        {"minkowski-cartesian", "flat metric diag(1,-1,-1,-1) in a Lorentz chart"},
        {"minkowski-spherical", "flat metric in spherical coordinates"},
        {"schwarzschild", "Schwarzschild metric, parameter m, flat spherical background"},
        {"logunov", "Logunov's vacuum metric with free lambda, flat spherical background"},
        {"flrw-exp", "spatially flat FLRW with exponential scale factor (not Ricci flat)"},
        {"perturbed-random", "Minkowski plus a seeded quadratic perturbation"},
        {"coframe-identity", "distortion field h = identity"},
        {"coframe-x1", "h^0_0 = 1 + 0.1 x: flat divergence zero, effective divergence nonzero"},
        {"coframe-pp", "h^0_2 = h^1_2 = 0.1 sin(t - x): both divergences zero, dg nonzero"},
        {"coframe-h00", "h^0_0 = 1.1: witness that the postulated density split fails"},
        {"coframe-shear", "h^0_0 = 1 + 0.05 x y"},
        {"coframe-random", "seeded random quadratic distortion field"},
    };
}

/// Built-in spec by name. The seed only affects the random entries.
inline MetricSpec catalog_get(const std::string& name, std::uint64_t seed = 1) {
    using namespace detail;
    if (name == "minkowski-cartesian") {
        MetricSpec s = cartesian_base(name);
        s.metric = s.background = minkowski_grid();
        return s;
    }
    if (name == "minkowski-spherical") {
        MetricSpec s = spherical_base(name, {}, 1.0, 10.0);
        s.metric = s.background = flat_spherical_grid();
        return s;
    }
    if (name == "schwarzschild") {
        MetricSpec s = spherical_base(name, {{"m", 1.0}}, 4.0, 100.0);
        s.metric = diagonal_grid({"1-2*m/r", "-1/(1-2*m/r)", "-r^2", "-r^2*sin(theta)^2"});
        s.background = flat_spherical_grid();
        s.excluded.push_back("r-2*m");
        return s;
    }
    if (name == "logunov") {
        MetricSpec s = spherical_base(name, {{"m", 1.0}, {"lambda", 0.0}}, 4.0, 100.0);
        s.metric = diagonal_grid({"(r+lambda-m)/(r+lambda+m)", "-(r+lambda+m)/(r+lambda-m)", "-(r+lambda+m)^2",
                                  "-(r+lambda+m)^2*sin(theta)^2"});
        s.background = flat_spherical_grid();
        s.excluded.push_back("r+lambda-m");
        return s;
    }
    if (name == "flrw-exp") {
        MetricSpec s = cartesian_base(name);
        s.constants = {{"H", 0.5}};
        s.metric = diagonal_grid({"1", "-exp(2*H*t)", "-exp(2*H*t)", "-exp(2*H*t)"});
        s.background = minkowski_grid();
        return s;
    }
    if (name == "perturbed-random") {
        MetricSpec s = cartesian_base(name, 0.5);
        std::mt19937_64 rng(seed);
        s.metric = random_metric_grid(rng, s.coordinates);
        s.background = minkowski_grid();
        s.sample.seed = seed;
        return s;
    }
    if (name == "coframe-identity") return distortion_base(name, ExprGrid{});
    if (name == "coframe-x1") return distortion_base(name, single_entry(0, 0, "1+0.1*x"));
    if (name == "coframe-pp") {
        ExprGrid h{};
        h[0][2] = h[1][2] = "0.1*sin(t-x)";
        return distortion_base(name, h);
    }
    if (name == "coframe-h00") return distortion_base(name, single_entry(0, 0, "1.1"));
    if (name == "coframe-shear") return distortion_base(name, single_entry(0, 0, "1+0.05*x*y"));
    if (name == "coframe-random") {
        std::mt19937_64 rng(seed);
        MetricSpec s = distortion_base(name, random_distortion_grid(rng));
        s.sample.seed = seed;
        return s;
    }
    std::string known;
    for (const auto& e : catalog_list()) known += (known.empty() ? "" : ", ") + e.name;
    throw SpecError("catalog:" + name, "unknown catalog entry; known: " + known);
}

/// "catalog:<name>" or a path to a JSON spec file.
inline MetricSpec resolve_spec(const std::string& ref, std::uint64_t seed = 1) {
    static constexpr std::string_view kPrefix = "catalog:";
    if (ref.rfind(kPrefix, 0) == 0) return catalog_get(ref.substr(kPrefix.size()), seed);
    return load_spec_file(ref);
}

}  // namespace gaugeforge
