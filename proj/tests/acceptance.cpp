// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// Reference values come from closed forms worked out by hand (Logunov and
// harmonic residuals of the two spherical metrics) or from central
// differences on point values, never from the jet engine itself.

#include "oracles.hpp"
#include "random_expr.hpp"

#include <gaugeforge/gaugeforge.hpp>

#include <Eigen/Dense>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace gaugeforge;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

Point random_point(std::mt19937_64& rng, double w = 0.4) {
    std::uniform_real_distribution<double> u(-w, w);
    return {u(rng), u(rng), u(rng), u(rng)};
}

DistortionField box_field(const ExprGrid& grid) { return DistortionField::parse(unit_box_chart(), grid); }

std::vector<Point> spec_points(const MetricSpec& s, const SpecFields& f) {
    return sample_points(*f.chart, s.sample.points, s.sample.seed).points;
}

MetricSpec logunov_spec(double lambda) {
    MetricSpec s = catalog_get("logunov");
    s.constants["lambda"] = lambda;
    return s;
}

double max_ricci(const MetricField& g, const Point& p) {
    double m = 0.0;
    for (const auto& row : curvature(g, p).ricci)
        for (double x : row) m = std::max(m, std::abs(x));
    return m;
}

// 1. Vacuum check.
Outcome ac1() {
    double worst = 0.0;
    int pts = 0;
    std::vector<MetricSpec> specs{catalog_get("schwarzschild")};
    for (double l : {0.0, 1.0, 5.0}) specs.push_back(logunov_spec(l));
    for (const auto& s : specs) {
        const auto f = materialize(s);
        for (const auto& p : spec_points(s, f)) {
            worst = std::max(worst, max_ricci(*f.metric, p));
            ++pts;
        }
    }
    return {worst < 1e-8 && pts == 80, "max |Ric| = " + sci(worst) + " over " + std::to_string(pts) + " points"};
}

// 2. Gauge separation.
Outcome ac2() {
    const auto ss = catalog_get("schwarzschild");
    const auto sf = materialize(ss);
    const auto ls = logunov_spec(0.0);
    const auto lf = materialize(ls);
    const double m = 1.0;

    double logunov_l0 = 0.0, schw_rel = 0.0, harm_rel = 0.0, harm_min = 1e300;
    for (const auto& p : spec_points(ls, lf)) {
        const auto r = logunov_residual(*lf.metric, *lf.background, p);
        for (double v : r) logunov_l0 = std::max(logunov_l0, std::abs(v));
        const auto h = harmonic_residual(*lf.metric, p);
        const double want = -2.0 * p[1] / ((p[1] + m) * (p[1] + m));
        harm_rel = std::max(harm_rel, std::abs(h[1] - want) / std::abs(want));
        harm_min = std::min(harm_min, std::abs(h[1]));
    }
    for (const auto& p : spec_points(ss, sf)) {
        const auto r = logunov_residual(*sf.metric, *sf.background, p);
        const double want = 2.0 * m * std::sin(p[2]);
        schw_rel = std::max(schw_rel, std::abs(r[1] - want) / want);
    }
    const bool harmonic_fails = harm_min > kDefaultTol;
    return {logunov_l0 < 1e-9 && schw_rel < 1e-8 && harm_rel < 1e-8 && harmonic_fails,
            "Logunov(l=0) " + sci(logunov_l0) + ", Schwarzschild vs 2m sin(theta) rel " + sci(schw_rel) +
                ", box r vs -2r/(r+m)^2 rel " + sci(harm_rel) + ", min |box r| " + sci(harm_min)};
}

// 3. Pair identity sweep.
Outcome ac3() {
    std::mt19937_64 rng(303);
    const auto chart = unit_box_chart();
    std::map<std::string, double> worst;
    int pts = 0;
    for (int n = 0; n < 50; ++n) {
        const auto g = MetricField::parse(chart, random_metric_grid(rng, chart->names()));
        const auto g0 = MetricField::parse(chart, random_metric_grid(rng, chart->names()));
        for (const auto& p : sample_points(*chart, 20, 1000 + n).points) {
            for (const auto& r : pair_identities(g, g0, p)) worst[r.name] = std::max(worst[r.name], r.value);
            ++pts;
        }
    }
    double m = 0.0;
    std::string name;
    for (const auto& [k, v] : worst)
        if (v >= m) m = v, name = k;
    return {m < 1e-8 && pts == 1000,
            std::to_string(worst.size()) + " identities x " + std::to_string(pts) + " points, worst " + name + " " + sci(m)};
}

// 4. Hodge-Laplacian split plus a difference check of the Hodge side.
Outcome ac4() {
    std::mt19937_64 rng(404);
    const auto chart = unit_box_chart();
    double split = 0.0;
    int evaluated = 0;
    std::vector<DistortionField> fields;
    for (int n = 0; n < 20; ++n) {
        fields.push_back(box_field(random_distortion_grid(rng)));
        for (const auto& p : sample_points(*chart, 20, 400 + n).points) {
            split = std::max(split, laplacian_split(coframe_from_h<2>(fields.back(), p)).residual);
            ++evaluated;
        }
    }
    double fd = 0.0;
    for (int n = 0; n < 5; ++n) {
        const auto& hf = fields[n];
        const Point p = random_point(rng);
        const auto s = laplacian_split(coframe_from_h<2>(hf, p));
        oracle::MatFn g = [&](const Point& q) { return effective_metric(hf.value(q)); };
        for (int k = 0; k < 4; ++k) {
            const auto want = oracle::hodge_dalembertian(g, [&](const Point& q) { return hf.value(q)[k]; }, p, 1e-4);
            for (int nu = 0; nu < 4; ++nu) fd = std::max(fd, oracle::rel_err(want[nu], s.hodge[k][1 + nu]));
        }
    }
    return {split < 1e-7 && fd < 1e-4 && evaluated == 400,
            "split residual " + sci(split) + " over " + std::to_string(evaluated) + " points, difference check rel " + sci(fd)};
}

// 5. Superpotential equivalence.
Outcome ac5() {
    std::mt19937_64 rng(505);
    double worst = 0.0, size = 1e300;
    for (int n = 0; n < 50; ++n) {
        const auto s = superpotential(coframe_from_h<1>(box_field(random_distortion_grid(rng, 1, 2.0)), random_point(rng)));
        worst = std::max(worst, s.residual);
        double d = 0.0;
        for (const auto& f : s.direct) d = std::max(d, f.max_abs());
        size = std::min(size, d);
    }
    return {worst < 1e-10 && size > 1e-3, "residual " + sci(worst) + ", smallest |*S| " + sci(size)};
}

// 6. Wave identity and conservation law.
Outcome ac6() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> mass(0.0, 1.0);
    double wave = 0.0, cons = 0.0;
    for (int n = 0; n < 200; ++n) {
        const auto hf = box_field(random_distortion_grid(rng));
        const Point p = random_point(rng);
        const double m = mass(rng);
        wave = std::max(wave, wave_residual(coframe_from_h<2>(hf, p), m).residual);
        cons = std::max(cons, conservation_residual(coframe_from_h<3>(hf, p), m).residual);
    }
    return {wave < 1e-6 && cons < 1e-7, "wave " + sci(wave) + ", conservation " + sci(cons) + " over 200 fields"};
}

// 7. Flat codifferential against the index divergence, and the witness.
Outcome ac7() {
    std::mt19937_64 rng(707);
    double jet_gap = 0.0, fd_gap = 0.0;
    for (int n = 0; n < 200; ++n) {
        const auto hf = box_field(random_distortion_grid(rng));
        const Point p = random_point(rng);
        const auto delta = coframe_divergence(hf, p, MetricChoice::Flat);
        const auto index = flat_divergence_index_form(hf, p);
        for (int a = 0; a < 4; ++a) {
            jet_gap = std::max(jet_gap, std::abs(delta[a] - index[a]));
            // -eta^{kb} d_k h^a_b by differences (exact for quadratics up to rounding)
            double want = 0.0;
            for (int k = 0; k < 4; ++k)
                want -= kEtaDiag[k] * oracle::central([&](const Point& q) { return hf.component(a, k).value(q); }, p, k, 1e-3);
            fd_gap = std::max(fd_gap, std::abs(delta[a] - want));
        }
    }
    const auto ws = catalog_get("coframe-x1");
    const auto wf = materialize(ws);
    double flat = 0.0, eff_min = 1e300;
    for (const auto& p : spec_points(ws, wf)) {
        const auto d0 = coframe_divergence(*wf.h, p, MetricChoice::Flat);
        const auto de = coframe_divergence(*wf.h, p, MetricChoice::Effective);
        double e = 0.0;
        for (int a = 0; a < 4; ++a) {
            flat = std::max(flat, std::abs(d0[a]));
            e = std::max(e, std::abs(de[a]));
        }
        eff_min = std::min(eff_min, e);
    }
    return {jet_gap < 1e-12 && fd_gap < 1e-9 && flat < 1e-12 && eff_min > 1e-3,
            "delta0 g^a = -eta^{kb} d_k h^a_b to " + sci(jet_gap) + " (differences " + sci(fd_gap) +
                "); coframe-x1: |delta0| " + sci(flat) + ", min |delta_eff| " + sci(eff_min)};
}

// 8. Extensor square root.
Outcome ac8() {
    std::mt19937_64 rng(808);
    const auto eta = minkowski_metric();
    double roundtrip = 0.0, pairing = 0.0;
    int checked = 0, drawn = 0;
    while (checked < 100) {
        ++drawn;
        const Extensor h0{box_field(random_distortion_grid(rng, 2, 3.0, true)).value(random_point(rng))};
        Eigen::Matrix4d m;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) m(a, b) = h0.matrix[a][b];
        const auto ev = Eigen::EigenSolver<Eigen::Matrix4d>(m, false).eigenvalues();
        if ((ev.imag().array().abs() > 1e-9).any() || (ev.real().array() <= 0).any()) continue;
        ++checked;
        const Extensor h = extensor_sqrt(metric_from_extensor(h0));
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) roundtrip = std::max(roundtrip, std::abs(h.matrix[a][b] - h0.matrix[a][b]));
        const Extensor g = h.adjoint() * h;
        const Extensor hinv = h.inverse();
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                const auto ta = outermorphism(hinv, Multiform<double>::basis(1 << a));
                const auto tb = outermorphism(hinv, Multiform<double>::basis(1 << b));
                const double want = a == b ? kEtaDiag[a] : 0.0;
                pairing = std::max(pairing, std::abs(scalar_product(outermorphism(g, ta), tb, eta) - want));
            }
    }
    return {roundtrip < 1e-9 && pairing < 1e-10,
            "round trip " + sci(roundtrip) + ", pairing " + sci(pairing) + " (100 of " + std::to_string(drawn) + " draws)"};
}

// 9. Postulate gap.
Outcome ac9() {
    double id = 0.0, w = 1e300;
    for (const char* name : {"coframe-identity", "coframe-h00"}) {
        const auto s = catalog_get(name);
        const auto f = materialize(s);
        const double kl = s.constant_or("kappa_L", 1.0);
        for (const auto& p : spec_points(s, f)) {
            const double gap = postulate_gap(*f.h, kl, p);
            if (std::string(name) == "coframe-identity") id = std::max(id, gap);
            else w = std::min(w, gap);
        }
    }
    return {id == 0.0 && w > 1e-3, "identity gap " + sci(id) + ", h^0_0 = 1.1 gap " + sci(w)};
}

// 10. Jet engine against differences over the catalog, and print/parse.
Outcome ac10() {
    double first = 0.0, second = 0.0;
    int scalars = 0;
    auto check = [&](const JetScalar& f, const Point& p) {
        const auto j = f.jet<2>(p);
        std::array<double, 4> h1{}, h2{};
        for (int a = 0; a < 4; ++a) {
            h1[a] = 1e-6 * std::max(1.0, std::abs(p[a]));
            h2[a] = 1e-4 * std::max(1.0, std::abs(p[a]));
        }
        auto at = [&](Point q, int i, double di, int k, double dk) {
            q[i] += di;
            q[k] += dk;
            return f.value(q);
        };
        for (int a = 0; a < 4; ++a) {
            const double d = (at(p, a, h1[a], a, 0) - at(p, a, -h1[a], a, 0)) / (2 * h1[a]);
            first = std::max(first, oracle::rel_err(j.d(a), d));
            for (int b = 0; b < 4; ++b) {
                double dd;
                if (a == b)
                    dd = (at(p, a, h2[a], a, 0) - 2 * f.value(p) + at(p, a, -h2[a], a, 0)) / (h2[a] * h2[a]);
                else
                    dd = (at(p, a, h2[a], b, h2[b]) - at(p, a, h2[a], b, -h2[b]) - at(p, a, -h2[a], b, h2[b]) +
                          at(p, a, -h2[a], b, -h2[b])) /
                         (4 * h2[a] * h2[b]);
                second = std::max(second, oracle::rel_err(j.d(a, b), dd));
            }
        }
        ++scalars;
    };
    for (const auto& e : catalog_list()) {
        const auto s = catalog_get(e.name);
        const auto f = materialize(s);
        for (const auto& p : spec_points(s, f)) {
            for (int i = 0; i < 4; ++i)
                for (int k = i; k < 4; ++k) {
                    check(f.metric->component(i, k), p);
                    if (f.background) check(f.background->component(i, k), p);
                }
            if (f.h)
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) check(f.h->component(a, b), p);
        }
    }

    std::mt19937_64 rng(1010);
    const auto chart = unit_box_chart(1.0);
    int exact = 0;
    for (int n = 0; n < 100; ++n) {
        const auto f = parse_expr(fixture::random_expr(rng, 4), chart);
        const auto g = parse_expr(f.to_string(), chart);
        bool same = f.to_string() == g.to_string();
        for (int k = 0; k < 10 && same; ++k) {
            const Point p = random_point(rng, 1.0);
            try {
                same = f.value(p) == g.value(p);
            } catch (const DomainError&) {
                try {
                    g.value(p);
                    same = false;
                } catch (const DomainError&) {
                }
            }
        }
        exact += same;
    }
    return {first < 1e-7 && second < 1e-5 && exact == 100,
            std::to_string(scalars) + " component evaluations: first rel " + sci(first) + ", second rel " + sci(second) +
                "; round trip exact " + std::to_string(exact) + "/100"};
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* title;
        double time_limit;  // seconds, 0 for none
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {"AC1", "vacuum metrics are Ricci flat", 5.0, ac1},
        {"AC2", "Logunov gauge holds, harmonic fails", 5.0, ac2},
        {"AC3", "pair identity sweep", 60.0, ac3},
        {"AC4", "Hodge-Laplacian split", 0.0, ac4},
        {"AC5", "superpotential equivalence", 0.0, ac5},
        {"AC6", "wave identity and conservation", 0.0, ac6},
        {"AC7", "flat codifferential vs index divergence, witness", 0.0, ac7},
        {"AC8", "extensor square root", 0.0, ac8},
        {"AC9", "postulate gap", 0.0, ac9},
        {"AC10", "jet engine vs differences, print/parse", 0.0, ac10},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.time_limit > 0 && secs >= c.time_limit) {
            o.pass = false;
            o.detail += "; over the " + sci(c.time_limit) + " s limit";
        }
        std::printf("%-4s %s  %s: %s [%.2f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
