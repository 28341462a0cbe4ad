/**
 * @file gauge.hpp
 * @brief Gauge-condition residuals: the Logunov condition on the metric
 *        density, harmonic coordinates, Lorenz-type divergences of a
 *        coframe, and the implications that hold among them.
 *
 * Throughout, K = Gamma - Gamma0 and the density is G^{mu nu} =
 * sqrt(-det g) g^{mu nu}. The bridge relation
 *   D0_mu G^{mu nu} = -K^nu_{mu k} G^{mu k}
 * holds for every pair of metrics, so
 *   harmonic    => D0_mu G^{mu nu} =  Gamma0^nu_{mu a} G^{mu a}
 *   Logunov     => box x^mu        = -Gamma0^mu_{a n} g^{a n}
 * and neither gauge implies the other.
 */
#pragma once

#include <gaugeforge/connection.hpp>
#include <gaugeforge/distortion.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace gaugeforge {

/// Absolute threshold below which a gauge condition counts as satisfied.
inline constexpr double kGaugeActiveTol = 1e-9;

namespace detail {

inline Mat4<Jet<2>> metric_density(const Mat4<Jet<2>>& g, const Mat4<Jet<2>>& inv) {
    const Jet<2> sg = sqrt(-det(g));
    Mat4<Jet<2>> d;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) d[i][j] = sg * inv[i][j];
    return d;
}

/// D_mu A^{mu nu} for a weight-1 contravariant density.
inline Vec4<double> density_divergence(const Mat4<Jet<2>>& density, const Tensor3<Jet<1>>& gamma) {
    const auto d = covderiv_relative(from_matrix(density, 2, 0, 1.0), gamma);
    Vec4<double> r{};
    for (int nu = 0; nu < kDim; ++nu)
        for (int mu = 0; mu < kDim; ++mu) r[nu] += d.c[(mu * kDim + mu) * kDim + nu].value();
    return r;
}

/// A^mu_{a b} B^{a b}.
template <class A, class B>
Vec4<double> trace_with(const Tensor3<A>& t, const Mat4<B>& m) {
    Vec4<double> r{};
    for (int mu = 0; mu < kDim; ++mu)
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b) r[mu] += value_of(t[mu][a][b]) * value_of(m[a][b]);
    return r;
}

}  // namespace detail

/// D0_mu (sqrt(-det g) g^{mu nu}) for nu = 0..3.
inline Vec4<double> logunov_residual(const MetricField& metric, const MetricField& background, const Point& p) {
    const auto g = metric.jet<2>(p);
    const auto g0 = background.jet<2>(p);
    const auto gamma0 = christoffel_symbols<2>(g0);
    return detail::density_divergence(detail::metric_density(g, inverse(g)), gamma0);
}

/// box x^mu = -Gamma^mu_{a n} g^{a n}.
inline Vec4<double> harmonic_residual(const MetricField& metric, const Point& p) {
    const auto g = metric.jet<1>(p);
    const auto inv = inverse(g);
    const auto gamma = christoffel_symbols<1>(g, inv);
    Vec4<double> r = detail::trace_with(gamma, inv);
    for (auto& v : r) v = -v;
    return r;
}

/// box x^mu written as -Gamma0^mu_{a n} g^{a n} - K^mu_{a n} g^{a n}.
struct HarmonicSplit {
    Vec4<double> box{};
    Vec4<double> flat_part{};
    Vec4<double> contorsion_part{};
    double recombination = 0.0;
};

inline HarmonicSplit harmonic_split(const MetricField& metric, const MetricField& background, const Point& p) {
    const PairEvaluation e(metric, background, p);
    HarmonicSplit s;
    s.box = harmonic_residual(metric, p);
    s.flat_part = detail::trace_with(e.gamma0, e.inv);
    s.contorsion_part = detail::trace_with(e.K, e.inv);
    Residual r;
    for (int mu = 0; mu < kDim; ++mu) {
        s.flat_part[mu] = -s.flat_part[mu];
        s.contorsion_part[mu] = -s.contorsion_part[mu];
        r.add(s.box[mu], s.flat_part[mu] + s.contorsion_part[mu]);
        r.add_term(s.flat_part[mu]);
        r.add_term(s.contorsion_part[mu]);
    }
    s.recombination = r.value();
    return s;
}

/// Bridge residual at one point: D0_mu G^{mu nu} + K^nu_{mu k} G^{mu k}.
inline double bridge_residual(const PairEvaluation& e) {
    const auto density = detail::metric_density(e.g, e.inv);
    const Vec4<double> div = detail::density_divergence(density, e.gamma0);
    const Vec4<double> kg = detail::trace_with(e.K, density);
    Residual r;
    for (int nu = 0; nu < kDim; ++nu) r.add(div[nu], -kg[nu]);
    return r.value();
}

/// Implication checks over a set of points. An implication that never became
/// active reports no value.
struct GaugeImplications {
    double bridge = 0.0;
    std::optional<double> harmonic_implies;  // D0 G = Gamma0 G where box x = 0
    std::optional<double> logunov_implies;   // box x = -Gamma0 g where D0 G = 0
    int harmonic_active = 0;
    int logunov_active = 0;

    std::vector<NamedResidual> named() const {
        std::vector<NamedResidual> out{{"bridge", bridge}};
        if (harmonic_implies) out.push_back({"harmonic-implies-flat-divergence", *harmonic_implies});
        if (logunov_implies) out.push_back({"logunov-implies-flat-box", *logunov_implies});
        return out;
    }
};

inline GaugeImplications gauge_implications(const MetricField& metric, const MetricField& background,
                                            const std::vector<Point>& points) {
    GaugeImplications out;
    for (const Point& p : points) {
        const PairEvaluation e(metric, background, p);
        out.bridge = std::max(out.bridge, bridge_residual(e));

        const auto density = detail::metric_density(e.g, e.inv);
        const Vec4<double> div = detail::density_divergence(density, e.gamma0);
        const Vec4<double> box = harmonic_residual(metric, p);
        double box_max = 0.0, div_max = 0.0;
        for (int mu = 0; mu < kDim; ++mu) {
            box_max = std::max(box_max, std::abs(box[mu]));
            div_max = std::max(div_max, std::abs(div[mu]));
        }

        if (box_max < kGaugeActiveTol) {
            const Vec4<double> g0g = detail::trace_with(e.gamma0, density);
            Residual r;
            for (int nu = 0; nu < kDim; ++nu) r.add(div[nu], g0g[nu]);
            out.harmonic_implies = std::max(out.harmonic_implies.value_or(0.0), r.value());
            ++out.harmonic_active;
        }
        if (div_max < kGaugeActiveTol) {
            const Vec4<double> g0g = detail::trace_with(e.gamma0, e.inv);
            Residual r;
            for (int mu = 0; mu < kDim; ++mu) r.add(box[mu], -g0g[mu]);
            out.logunov_implies = std::max(out.logunov_implies.value_or(0.0), r.value());
            ++out.logunov_active;
        }
    }
    return out;
}

/// delta_g of the coordinate coframe dx^mu; equals -box x^mu.
inline Vec4<double> coordinate_coframe_divergence(const MetricField& metric, const Point& p) {
    const auto geo = Geometry<2>::from_covariant(metric.jet<2>(p));
    Vec4<double> r{};
    for (int mu = 0; mu < kDim; ++mu)
        r[mu] = codifferential(Multiform<Jet<1>>::basis(1 << mu), geo.metric, geo.gamma)[0].value();
    return r;
}

/// kappa_L max|kappa g^{ki} - (eta^{ki} + (h - 1)^k_b eta^{bi})| with
/// kappa = |det h| and g the effective metric of h.
inline double postulate_gap(const Mat4<double>& h, double kappa_l) {
    const double dh = det(h);
    if (!(std::abs(dh) > 1e-12)) throw DomainError("distortion field is not invertible");
    const Mat4<double> ginv = inverse(effective_metric(h));
    const double kappa = std::abs(dh);
    double gap = 0.0;
    for (int k = 0; k < kDim; ++k)
        for (int i = 0; i < kDim; ++i) {
            const double split = (k == i ? kEtaDiag[k] : 0.0) + (h[k][i] - (k == i ? 1.0 : 0.0)) * kEtaDiag[i];
            gap = std::max(gap, std::abs(kappa * ginv[k][i] - split));
        }
    return kappa_l * gap;
}

inline double postulate_gap(const DistortionField& h, double kappa_l, const Point& p) {
    return postulate_gap(h.value(p), kappa_l);
}

/// Per-point gauge data for a metric pair, or for a distortion field when one
/// is given (then the background is Minkowski in the Lorentz chart).
struct GaugeReport {
    std::vector<Vec4<double>> logunov;
    std::vector<Vec4<double>> harmonic;
    std::vector<Vec4<double>> lorenz_flat;    // delta0 g^a, distortion mode only
    std::vector<Vec4<double>> lorenz_curved;  // delta_g dx^mu
    GaugeImplications implications;
};

inline GaugeReport gauge_report(const MetricField& metric, const MetricField& background,
                                const std::vector<Point>& points, const DistortionField* h = nullptr) {
    GaugeReport r;
    for (const Point& p : points) {
        r.logunov.push_back(logunov_residual(metric, background, p));
        r.harmonic.push_back(harmonic_residual(metric, p));
        r.lorenz_curved.push_back(coordinate_coframe_divergence(metric, p));
        if (h) r.lorenz_flat.push_back(coframe_divergence(*h, p, MetricChoice::Flat));
    }
    r.implications = gauge_implications(metric, background, points);
    return r;
}

/// The effective metric of a distortion field as a MetricField on the same
/// chart, built from expression strings so that jets stay exact.
inline MetricField effective_metric_field(const DistortionField& h, const ExprGrid& src,
                                          const ConstantMap& constants = {}) {
    ExprGrid g;
    for (int mu = 0; mu < kDim; ++mu)
        for (int nu = mu; nu < kDim; ++nu) {
            std::string s;
            for (int a = 0; a < kDim; ++a) {
                const std::string& x = src[a][mu].empty() ? (a == mu ? "1" : "0") : src[a][mu];
                const std::string& y = src[a][nu].empty() ? (a == nu ? "1" : "0") : src[a][nu];
                if (x == "0" || y == "0") continue;
                s += (kEtaDiag[a] > 0 ? "+" : "-") + std::string("(") + x + ")*(" + y + ")";
            }
            if (!s.empty() && s[0] == '+') s.erase(0, 1);
            g[mu][nu] = s.empty() ? "0" : s;
        }
    return MetricField::parse(h.chart_ptr(), g, constants);
}

}  // namespace gaugeforge
