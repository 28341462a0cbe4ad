/**
 * @file report.hpp
 * @brief Runs named checks over the sample points of a spec and assembles a
 *        report: per-point values, aggregate (the max over points), and a
 *        pass/fail verdict against a tolerance.
 *
 * Metric specs support: ricci-flat, logunov, harmonic, bridge, implications,
 * identities, laplacian, signature. Distortion specs support: laplacian,
 * superpotential, wave, conservation, lorenz-flat, lorenz-effective,
 * equivalence, postulate-gap, lagrangian-invariance, extensor-sqrt.
 *
 * A point where the geometry is singular (DomainError) is skipped with a
 * warning and counted; it never fails a check by itself.
 */
#pragma once

#include <gaugeforge/connection.hpp>
#include <gaugeforge/distortion.hpp>
#include <gaugeforge/gauge.hpp>
#include <gaugeforge/sampling.hpp>
#include <gaugeforge/spec.hpp>
#include <gaugeforge/stress_forms.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifndef GAUGEFORGE_VERSION
#define GAUGEFORGE_VERSION "0.1.0"
#endif

namespace gaugeforge {

inline constexpr double kDefaultTol = 1e-8;
inline constexpr double kDefaultTol3 = 1e-6;

struct ReportOptions {
    std::vector<std::string> checks;    // empty: every check of the spec's mode
    std::optional<int> points;          // overrides spec.sample.points
    std::optional<std::uint64_t> seed;  // overrides spec.sample.seed
    double tol = kDefaultTol;
    double tol3 = kDefaultTol3;
    std::optional<double> mass;  // overrides the "mass" constant
};

struct CheckResult {
    std::string name;
    double tolerance = 0.0;
    std::vector<std::optional<double>> values;  // one per point; empty when skipped or inactive
    std::vector<std::vector<double>> components;  // optional per-point detail (e.g. the 4 residual components)
    std::vector<std::string> warnings;
    nlohmann::json details = nlohmann::json::object();
    int skipped = 0;

    std::optional<double> aggregate() const {
        std::optional<double> m;
        for (const auto& v : values)
            if (v) m = std::max(m.value_or(0.0), *v);
        return m;
    }
    /// Passes when every evaluated point is within tolerance. A check with no
    /// evaluated point passes vacuously and says so in its warnings.
    bool pass() const {
        const auto a = aggregate();
        return !a || *a <= tolerance;
    }
};

struct Report {
    MetricSpec spec;
    std::vector<Point> points;
    int rejected_points = 0;
    std::vector<CheckResult> checks;
    std::vector<std::string> warnings;
    double seconds = 0.0;
    double tol = kDefaultTol, tol3 = kDefaultTol3;
    std::uint64_t seed = 1;

    bool pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass(); });
    }
};

inline const std::vector<std::string>& metric_checks() {
    static const std::vector<std::string> v{"ricci-flat", "logunov", "harmonic", "bridge",
                                            "implications", "identities", "laplacian", "signature"};
    return v;
}

inline const std::vector<std::string>& distortion_checks() {
    static const std::vector<std::string> v{"laplacian",     "superpotential",        "wave",         "conservation",
                                            "lorenz-flat",   "lorenz-effective",      "equivalence",  "postulate-gap",
                                            "lagrangian-invariance", "extensor-sqrt"};
    return v;
}

namespace detail {

inline double max_abs4(const Vec4<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline std::string format_point(const Point& p) {
    std::ostringstream os;
    os.precision(6);
    os << "(" << p[0] << ", " << p[1] << ", " << p[2] << ", " << p[3] << ")";
    return os.str();
}

/// Per-point evaluator: a value (or nothing if the check is inactive there)
/// and optional components.
struct PointValue {
    std::optional<double> value;
    std::vector<double> components;
};

using PointEval = std::function<PointValue(const Point&)>;

inline CheckResult run_points(std::string name, double tol, const std::vector<Point>& points, const PointEval& f) {
    CheckResult c;
    c.name = std::move(name);
    c.tolerance = tol;
    for (const Point& p : points) {
        try {
            PointValue v = f(p);
            c.values.push_back(v.value);
            c.components.push_back(std::move(v.components));
        } catch (const DomainError& e) {
            c.values.push_back(std::nullopt);
            c.components.emplace_back();
            c.warnings.push_back("skipped " + format_point(p) + ": " + e.what());
            ++c.skipped;
        }
    }
    return c;
}

inline std::vector<double> to_vector(const Vec4<double>& v) { return {v[0], v[1], v[2], v[3]}; }

}  // namespace detail

inline Report run_report(const MetricSpec& spec, const ReportOptions& opt = {}) {
    using namespace detail;
    const auto t0 = std::chrono::steady_clock::now();

    Report rep;
    rep.spec = spec;
    rep.tol = opt.tol;
    rep.tol3 = opt.tol3;
    rep.seed = opt.seed.value_or(spec.sample.seed);

    const SpecFields f = materialize(spec);
    const bool hmode = spec.distortion_mode();
    const auto& allowed = hmode ? distortion_checks() : metric_checks();
    std::vector<std::string> checks = opt.checks.empty() ? allowed : opt.checks;
    for (const auto& c : checks)
        if (std::find(allowed.begin(), allowed.end(), c) == allowed.end()) {
            std::string known;
            for (const auto& a : allowed) known += (known.empty() ? "" : ", ") + a;
            throw SpecError("--checks", "check '" + c + "' is not available for a " +
                                            (hmode ? "distortion-field" : "metric") + " spec; available: " + known);
        }

    const int n = opt.points.value_or(spec.sample.points);
    const auto samples = sample_points(*f.chart, n, rep.seed);
    rep.points = samples.points;
    rep.rejected_points = samples.rejected;
    if (static_cast<int>(rep.points.size()) < n)
        rep.warnings.push_back("only " + std::to_string(rep.points.size()) + " of " + std::to_string(n) +
                               " admissible points found");

    const MetricField& g = *f.metric;
    std::optional<MetricField> bg = f.background;
    if (!bg) {
        bg = MetricField::parse(f.chart, detail::minkowski_grid());
        rep.warnings.push_back("no background given; using diag(1,-1,-1,-1) in the spec's chart");
    }
    const double mass = opt.mass.value_or(spec.constant_or("mass", 0.0));
    const double kappa_l = spec.constant_or("kappa_L", 1.0);
    const auto& pts = rep.points;

    for (const std::string& name : checks) {
        CheckResult c;
        if (!hmode && name == "ricci-flat") {
            c = run_points(name, opt.tol, pts, [&](const Point& p) {
                const auto r = curvature(g, p).ricci;
                double m = 0.0;
                for (const auto& row : r)
                    for (double x : row) m = std::max(m, std::abs(x));
                return PointValue{m, {}};
            });
        } else if (!hmode && name == "logunov") {
            c = run_points(name, opt.tol, pts, [&](const Point& p) {
                const auto v = logunov_residual(g, *bg, p);
                return PointValue{max_abs4(v), to_vector(v)};
            });
        } else if (name == "harmonic") {
            c = run_points(name, opt.tol, pts, [&](const Point& p) {
                const auto v = harmonic_residual(g, p);
                return PointValue{max_abs4(v), to_vector(v)};
            });
        } else if (!hmode && name == "bridge") {
            c = run_points(name, opt.tol, pts,
                           [&](const Point& p) { return PointValue{bridge_residual(PairEvaluation(g, *bg, p)), {}}; });
        } else if (!hmode && name == "implications") {
            // per point: the larger of the two implication residuals among
            // those whose premise holds there
            int hact = 0, lact = 0;
            c = run_points(name, opt.tol, pts, [&](const Point& p) {
                const auto imp = gauge_implications(g, *bg, {p});
                hact += imp.harmonic_active;
                lact += imp.logunov_active;
                PointValue v;
                if (imp.harmonic_implies || imp.logunov_implies)
                    v.value = std::max(imp.harmonic_implies.value_or(0.0), imp.logunov_implies.value_or(0.0));
                v.components = {imp.harmonic_implies.value_or(-1.0), imp.logunov_implies.value_or(-1.0)};
                return v;
            });
            c.details["harmonic_active_points"] = hact;
            c.details["logunov_active_points"] = lact;
            if (hact + lact == 0) c.warnings.push_back("neither gauge holds at any sampled point; nothing to imply");
        } else if (!hmode && name == "identities") {
            std::map<std::string, double> worst;
            c = run_points(name, opt.tol, pts, [&](const Point& p) {
                double m = 0.0;
                for (const auto& r : pair_identities(g, *bg, p)) {
                    worst[r.name] = std::max(worst[r.name], r.value);
                    m = std::max(m, r.value);
                }
                return PointValue{m, {}};
            });
            for (const auto& [k, v] : worst) c.details["per_identity"][k] = v;
        } else if (!hmode && name == "laplacian") {
            c = run_points(name, opt.tol, pts, [&](const Point& p) { return PointValue{laplacian_split(g, p).residual, {}}; });
        } else if (!hmode && name == "signature") {
            c = run_points(name, 0.0, pts, [&](const Point& p) { return PointValue{g.lorentzian_at(p) ? 0.0 : 1.0, {}}; });
        } else if (hmode && name == "laplacian") {
            c = run_points(name, opt.tol, pts,
                           [&](const Point& p) { return PointValue{laplacian_split(coframe_from_h<2>(*f.h, p)).residual, {}}; });
        } else if (hmode && name == "superpotential") {
            c = run_points(name, opt.tol, pts,
                           [&](const Point& p) { return PointValue{superpotential(coframe_from_h<1>(*f.h, p)).residual, {}}; });
        } else if (hmode && name == "wave") {
            c = run_points(name, opt.tol3, pts, [&](const Point& p) {
                const auto w = wave_residual(coframe_from_h<2>(*f.h, p), mass);
                return PointValue{w.residual, {w.printed, w.d_delta_term}};
            });
            c.details["components"] = {"residual of the form with the unit Ricci coefficient", "max |1/2 d delta g|"};
        } else if (hmode && name == "conservation") {
            c = run_points(name, opt.tol3, pts, [&](const Point& p) {
                const auto r = conservation_residual(coframe_from_h<3>(*f.h, p), mass);
                return PointValue{r.residual, {r.printed}};
            });
            c.details["components"] = {"residual of the form with -1/2 m^2 d g in place of the mass term"};
        } else if (hmode && (name == "lorenz-flat" || name == "lorenz-effective")) {
            const auto choice = name == "lorenz-flat" ? MetricChoice::Flat : MetricChoice::Effective;
            c = run_points(name, opt.tol, pts, [&](const Point& p) {
                const auto v = coframe_divergence(*f.h, p, choice);
                return PointValue{max_abs4(v), to_vector(v)};
            });
        } else if (hmode && name == "equivalence") {
            // flat codifferential of g^a against -eta^{kb} d_k h^a_b
            c = run_points(name, opt.tol, pts, [&](const Point& p) {
                const auto a = coframe_divergence(*f.h, p, MetricChoice::Flat);
                const auto b = flat_divergence_index_form(*f.h, p);
                Residual r;
                for (int k = 0; k < kDim; ++k) r.add(a[k], b[k]);
                return PointValue{r.value(), {}};
            });
        } else if (hmode && name == "postulate-gap") {
            c = run_points(name, opt.tol, pts, [&](const Point& p) { return PointValue{postulate_gap(*f.h, kappa_l, p), {}}; });
        } else if (hmode && name == "lagrangian-invariance") {
            const auto lam = boost_rotation(0.4, 0.9);
            c = run_points(name, opt.tol, pts, [&](const Point& p) {
                const auto cf = coframe_from_h<1>(*f.h, p);
                const double l0 = lagrangian(cf, mass), l1 = lagrangian(lorentz_transform(cf, lam), mass);
                Residual r;
                r.add(l0, l1);
                return PointValue{r.value(), {l0}};
            });
            c.details["components"] = {"Lagrangian density value"};
        } else if (hmode && name == "extensor-sqrt") {
            // principal root of the effective metric, squared back
            int roundtrip = 0;
            c = run_points(name, opt.tol, pts, [&](const Point& p) {
                const Mat4<double> h = f.h->value(p);
                const Mat4<double> eff = effective_metric(h);
                if (!has_lorentz_signature(eff)) throw DomainError("effective metric is not Lorentzian");
                const Extensor s = extensor_sqrt(MetricExtensor<double>::from_covariant(eff));
                const Mat4<double> back = effective_metric(s.matrix);
                Residual r;
                double dh = 0.0;
                for (int a = 0; a < kDim; ++a)
                    for (int b = 0; b < kDim; ++b) {
                        r.add(back[a][b], eff[a][b]);
                        dh = std::max(dh, std::abs(s.matrix[a][b] - h[a][b]));
                    }
                if (dh < 1e-9) ++roundtrip;
                return PointValue{r.value(), {dh}};
            });
            c.details["components"] = {"max |sqrt - h| (zero when h is the principal root)"};
            c.details["points_recovering_h"] = roundtrip;
        } else {
            throw SpecError("--checks", "check '" + name + "' is not implemented");
        }
        if (!c.aggregate()) c.warnings.push_back("no point evaluated");
        rep.checks.push_back(std::move(c));
    }

    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---------------------------------------------------------------------------
// Output

inline nlohmann::json report_to_json(const Report& r, bool with_timing = true) {
    using nlohmann::json;
    json j;
    j["tool"] = {{"name", "gaugeforge"}, {"version", GAUGEFORGE_VERSION}};
    j["spec"] = spec_to_json(r.spec);
    j["options"] = {{"seed", r.seed}, {"tol", r.tol}, {"tol3", r.tol3}, {"points", r.points.size()}};
    j["points"] = json::array();
    for (const auto& p : r.points) j["points"].push_back(std::vector<double>(p.begin(), p.end()));
    j["rejected_candidates"] = r.rejected_points;
    j["warnings"] = r.warnings;
    j["checks"] = json::array();
    for (const auto& c : r.checks) {
        json cj;
        cj["name"] = c.name;
        cj["tolerance"] = c.tolerance;
        const auto a = c.aggregate();
        cj["aggregate"] = a ? json(*a) : json(nullptr);
        cj["pass"] = c.pass();
        cj["skipped"] = c.skipped;
        cj["values"] = json::array();
        for (const auto& v : c.values) cj["values"].push_back(v ? json(*v) : json(nullptr));
        if (std::any_of(c.components.begin(), c.components.end(), [](const auto& v) { return !v.empty(); }))
            cj["components"] = c.components;
        if (!c.details.empty()) cj["details"] = c.details;
        cj["warnings"] = c.warnings;
        j["checks"].push_back(std::move(cj));
    }
    j["pass"] = r.pass();
    if (with_timing) j["timing"] = {{"seconds", r.seconds}};
    return j;
}

inline std::string format_sci(std::optional<double> v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", *v);
    return buf;
}

/// Aligned plain-text table, one row per check.
inline std::string report_table(const Report& r) {
    std::vector<std::array<std::string, 5>> rows{{"check", "aggregate", "tolerance", "skipped", "status"}};
    for (const auto& c : r.checks)
        rows.push_back({c.name, format_sci(c.aggregate()), format_sci(c.tolerance), std::to_string(c.skipped),
                        c.pass() ? "PASS" : "FAIL"});
    std::array<std::size_t, 5> w{};
    for (const auto& row : rows)
        for (int i = 0; i < 5; ++i) w[i] = std::max(w[i], row[i].size());
    std::ostringstream os;
    os << "spec: " << r.spec.name << "  points: " << r.points.size() << "  seed: " << r.seed << "\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (int i = 0; i < 5; ++i) {
            os << rows[k][i];
            if (i < 4) os << std::string(w[i] - rows[k][i].size() + 2, ' ');
        }
        os << "\n";
        if (k == 0) os << std::string(w[0] + w[1] + w[2] + w[3] + w[4] + 8, '-') << "\n";
    }
    for (const auto& s : r.warnings) os << "warning: " << s << "\n";
    for (const auto& c : r.checks) {
        const std::size_t shown = std::min<std::size_t>(c.warnings.size(), 3);
        for (std::size_t i = 0; i < shown; ++i) os << "warning [" << c.name << "]: " << c.warnings[i] << "\n";
        if (c.warnings.size() > shown)
            os << "warning [" << c.name << "]: ... " << c.warnings.size() - shown << " more (see structured report)\n";
    }
    os << "overall: " << (r.pass() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

}  // namespace gaugeforge
