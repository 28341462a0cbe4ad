// gaugeforge command-line front end.
//
// Exit codes: 0 all checks pass, 1 a check exceeded its tolerance,
// 2 spec or usage error, 3 runtime error.

#include <gaugeforge/gaugeforge.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace gaugeforge;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kRuntime = 3 };

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<int> points;
    double tol = kDefaultTol;
    double tol3 = kDefaultTol3;
    std::string format = "table";
    std::string out;
};

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv("GAUGEFORGE_SEED");
    if (!s || !*s) return std::nullopt;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(s, &used);
        if (used != std::string(s).size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SpecError("GAUGEFORGE_SEED", std::string("not a non-negative integer: ") + s);
    }
}

void add_common(CLI::App* cmd, Common& c, bool tolerances = true) {
    cmd->add_option("--seed", c.seed, "sampling seed (GAUGEFORGE_SEED overrides)");
    cmd->add_option("--points", c.points, "number of sample points")->check(CLI::PositiveNumber);
    if (tolerances) {
        cmd->add_option("--tol", c.tol, "tolerance for order <= 2 identities")->capture_default_str();
        cmd->add_option("--tol3", c.tol3, "tolerance for order-3 identities")->capture_default_str();
    }
    cmd->add_option("--format", c.format, "table or structured")
        ->check(CLI::IsMember({"table", "structured"}))
        ->capture_default_str();
    cmd->add_option("--out", c.out, "also write the report to this file");
}

std::uint64_t effective_seed(const Common& c, const MetricSpec* spec = nullptr) {
    if (auto e = env_seed()) return *e;
    if (c.seed) return *c.seed;
    return spec ? spec->sample.seed : 1;
}

MetricSpec load(const std::string& ref, const Common& c) {
    const std::uint64_t seed = env_seed().value_or(c.seed.value_or(1));
    return resolve_spec(ref, seed);
}

void emit(const std::string& table, const nlohmann::json& structured, const Common& c) {
    const std::string body = c.format == "structured" ? structured.dump(2) + "\n" : table;
    std::cout << body;
    if (!c.out.empty()) {
        std::ofstream f(c.out);
        if (!f) throw std::runtime_error("cannot write " + c.out);
        f << body;
    }
}

int run_check(const std::string& ref, const std::string& checks, const Common& c, std::optional<double> mass = {}) {
    const MetricSpec spec = load(ref, c);
    ReportOptions o;
    if (!checks.empty()) {
        std::stringstream ss(checks);
        for (std::string item; std::getline(ss, item, ',');)
            if (!item.empty()) o.checks.push_back(item);
    }
    o.points = c.points;
    o.seed = effective_seed(c, &spec);
    o.tol = c.tol;
    o.tol3 = c.tol3;
    o.mass = mass;
    const Report r = run_report(spec, o);
    emit(report_table(r), report_to_json(r), c);
    return r.pass() ? kPass : kFail;
}

int run_identities(const std::string& ref, int pairs, const Common& c) {
    const MetricSpec spec = load(ref, c);
    if (spec.distortion_mode()) throw SpecError("identities", "needs a metric spec, not a distortion field");
    const std::uint64_t seed = effective_seed(c, &spec);
    const int npts = c.points.value_or(spec.sample.points);

    std::map<std::string, double> worst;
    int evaluated = 0, skipped = 0;
    auto sweep = [&](const MetricField& g, const MetricField& g0, const std::vector<Point>& pts) {
        for (const auto& p : pts) {
            try {
                for (const auto& r : pair_identities(g, g0, p)) worst[r.name] = std::max(worst[r.name], r.value);
                ++evaluated;
            } catch (const DomainError&) {
                ++skipped;
            }
        }
    };

    const SpecFields f = materialize(spec);
    const MetricField bg = f.background ? *f.background : MetricField::parse(f.chart, detail::minkowski_grid());
    sweep(*f.metric, bg, sample_points(*f.chart, npts, seed).points);

    // random pairs on a small Lorentz box
    std::mt19937_64 rng(SeedSequence(seed).split(0x1de).seed());
    const auto box = unit_box_chart();
    for (int n = 0; n < pairs; ++n) {
        const auto g = MetricField::parse(box, random_metric_grid(rng, box->names()));
        const auto g0 = MetricField::parse(box, random_metric_grid(rng, box->names()));
        sweep(g, g0, sample_points(*box, npts, seed + 1 + n).points);
    }

    bool ok = true;
    std::ostringstream table;
    std::size_t w = 8;
    for (const auto& [k, v] : worst) w = std::max(w, k.size());
    table << "identity" << std::string(w - 8 + 2, ' ') << "max residual  status\n";
    nlohmann::json j;
    j["evaluated_points"] = evaluated;
    j["skipped_points"] = skipped;
    j["pairs"] = pairs;
    j["seed"] = seed;
    j["tolerance"] = c.tol;
    for (const auto& [k, v] : worst) {
        const bool pass = v <= c.tol;
        ok = ok && pass;
        table << k << std::string(w - k.size() + 2, ' ') << format_sci(v) << "     " << (pass ? "PASS" : "FAIL") << "\n";
        j["identities"][k] = {{"max", v}, {"pass", pass}};
    }
    table << "points: " << evaluated << " evaluated, " << skipped << " skipped\n";
    j["pass"] = ok;
    emit(table.str(), j, c);
    return ok ? kPass : kFail;
}

int run_gauge(const std::string& ref, const Common& c) {
    const MetricSpec spec = load(ref, c);
    const SpecFields f = materialize(spec);
    const MetricField bg = f.background ? *f.background : MetricField::parse(f.chart, detail::minkowski_grid());
    const auto pts = sample_points(*f.chart, c.points.value_or(spec.sample.points), effective_seed(c, &spec)).points;
    const GaugeReport g = gauge_report(*f.metric, bg, pts, f.h ? &*f.h : nullptr);

    auto vec = [](const Vec4<double>& v) { return std::vector<double>(v.begin(), v.end()); };
    nlohmann::json j;
    j["spec"] = spec.name;
    j["points"] = nlohmann::json::array();
    std::ostringstream t;
    t << "point  |logunov|    |harmonic|   |lorenz-curved|" << (f.h ? "  |lorenz-flat|" : "") << "\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        nlohmann::json pj{{"x", std::vector<double>(pts[i].begin(), pts[i].end())},
                          {"logunov", vec(g.logunov[i])},
                          {"harmonic", vec(g.harmonic[i])},
                          {"lorenz_curved", vec(g.lorenz_curved[i])}};
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-5zu  %.3e    %.3e    %.3e", i, detail::max_abs4(g.logunov[i]),
                      detail::max_abs4(g.harmonic[i]), detail::max_abs4(g.lorenz_curved[i]));
        t << buf;
        if (f.h) {
            pj["lorenz_flat"] = vec(g.lorenz_flat[i]);
            std::snprintf(buf, sizeof buf, "       %.3e", detail::max_abs4(g.lorenz_flat[i]));
            t << buf;
        }
        t << "\n";
        j["points"].push_back(pj);
    }
    const auto& im = g.implications;
    j["implications"] = {{"bridge", im.bridge},
                         {"harmonic_active", im.harmonic_active},
                         {"logunov_active", im.logunov_active}};
    for (const auto& r : im.named()) {
        j["implications"][r.name] = r.value;
        t << r.name << ": " << format_sci(r.value) << "\n";
    }
    t << "harmonic holds at " << im.harmonic_active << " points, Logunov at " << im.logunov_active << "\n";
    bool ok = true;
    for (const auto& r : im.named()) ok = ok && r.value <= c.tol;
    j["pass"] = ok;
    emit(t.str(), j, c);
    return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gaugeforge: pointwise verification of gravitational field identities"};
    app.set_version_flag("--version", GAUGEFORGE_VERSION);
    app.require_subcommand(1);

    auto* catalog = app.add_subcommand("catalog", "built-in specs");
    catalog->require_subcommand(1);
    catalog->add_subcommand("list", "list built-in specs");
    auto* show = catalog->add_subcommand("show", "print a built-in spec as JSON");
    std::string show_name;
    show->add_option("name", show_name)->required();
    std::uint64_t show_seed = 1;
    show->add_option("--seed", show_seed, "seed for the random entries");

    Common cc;
    std::string ref, checks;
    auto* check = app.add_subcommand("check", "run checks on a spec file or catalog:<name>");
    check->add_option("spec", ref)->required();
    check->add_option("--checks", checks, "comma-separated check names (default: all for the spec's mode)");
    add_common(check, cc);

    Common ci;
    int pairs = 10;
    auto* ids = app.add_subcommand("identities", "sweep the pair identities over the spec and random pairs");
    ids->add_option("spec", ref)->required();
    ids->add_option("--pairs", pairs, "number of random metric pairs")->check(CLI::NonNegativeNumber)->capture_default_str();
    add_common(ids, ci);

    Common cg;
    auto* gauge = app.add_subcommand("gauge", "gauge-condition residuals and implications");
    gauge->add_option("spec", ref)->required();
    add_common(gauge, cg);

    Common cf;
    std::optional<double> mass;
    auto* feqs = app.add_subcommand("field-eqs", "field-equation suite for a distortion-field spec");
    feqs->add_option("spec", ref)->required();
    feqs->add_option("--mass", mass, "graviton mass (default: the spec's 'mass' constant)");
    add_common(feqs, cf);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    try {
        if (catalog->got_subcommand("list")) {
            for (const auto& e : catalog_list()) std::printf("%-22s %s\n", e.name.c_str(), e.summary.c_str());
            return kPass;
        }
        if (catalog->got_subcommand("show")) {
            std::cout << spec_to_json(catalog_get(show_name, env_seed().value_or(show_seed))).dump(2) << "\n";
            return kPass;
        }
        if (check->parsed()) return run_check(ref, checks, cc);
        if (ids->parsed()) return run_identities(ref, pairs, ci);
        if (gauge->parsed()) return run_gauge(ref, cg);
        if (feqs->parsed()) {
            const MetricSpec spec = load(ref, cf);
            if (!spec.distortion_mode()) throw SpecError("field-eqs", "needs a spec with an h_field");
            return run_check(ref, "superpotential,wave,conservation,laplacian,lagrangian-invariance", cf, mass);
        }
    } catch (const SpecError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kUsage;
}
