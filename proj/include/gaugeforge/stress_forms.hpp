/**
 * @file stress_forms.hpp
 * @brief Lagrangian density of the coframe field, its superpotential and
 *        energy-momentum forms, and the field-equation identities built
 *        from them.
 *
 * Every star, contraction and codifferential uses the effective metric
 * G = eta_{ab} g^a (x) g^b unless a Flat choice is passed. The free index k
 * of S^k, t^k, K^k and T^k is raised: wherever a formula contracts with the
 * k-th coframe form, g^k is used.
 *
 * The matter source T^k is never modelled. effective_source() defines it
 * from the field equation
 *   d *S^k + *t^k + 1/2 m^2 *g^k = -*T^k,
 * which turns the wave equation and the conservation law into identities
 * that must hold for every coframe.
 */
#pragma once

#include <gaugeforge/distortion.hpp>

#include <array>
#include <string>
#include <vector>

namespace gaugeforge {

template <class T>
using FormQuad = std::array<Multiform<T>, kDim>;

/// Coframe, its exterior derivative and the metric, all in one coefficient type.
template <class T>
struct FrameForms {
    FormQuad<T> up, dn;    // g^a, g_a
    FormQuad<T> dup, ddn;  // d g^a, d g_a
    MetricExtensor<T> g;

    /// Omega = sum_a d g^a ^ g_a.
    Multiform<T> omega() const {
        Multiform<T> r;
        for (int a = 0; a < kDim; ++a) r += wedge(dup[a], dn[a]);
        return r;
    }
    Multiform<T> star(const Multiform<T>& a) const { return hodge_star(a, g); }
    Multiform<T> lc(const Multiform<T>& a, const Multiform<T>& b) const { return contract_left(a, b, g); }
};

namespace detail {

template <class R, class T>
MetricExtensor<R> truncate_metric(const MetricExtensor<T>& g) {
    MetricExtensor<R> r;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
            r.components[i][j] = convert<R>(g.components[i][j]);
            r.inverse[i][j] = convert<R>(g.inverse[i][j]);
        }
    r.sqrt_neg_det = convert<R>(g.sqrt_neg_det);
    return r;
}

template <class T>
FormQuad<double> quad_values(const FormQuad<T>& q) {
    FormQuad<double> r;
    for (int k = 0; k < kDim; ++k) r[k] = q[k].values();
    return r;
}

}  // namespace detail

/// Frame forms of a coframe jet, one order lower than the jet.
template <int N>
FrameForms<Jet<N - 1>> frame_forms(const CoframeJet<N>& c, MetricChoice choice = MetricChoice::Effective) {
    using R = Jet<N - 1>;
    FrameForms<R> f;
    for (int a = 0; a < kDim; ++a) {
        f.up[a] = c.up[a].template as<R>();
        f.dn[a] = c.dn[a].template as<R>();
        f.dup[a] = exterior_derivative(c.up[a]);
        f.ddn[a] = exterior_derivative(c.dn[a]);
    }
    const auto geo = c.geometry(choice);
    f.g = detail::truncate_metric<R>(geo.metric);
    return f;
}

// ---------------------------------------------------------------------------
// Superpotential

/// *S^k = -g^a ^ *(d g_a ^ g^k) + 1/2 g^k ^ *Omega.
template <class T>
FormQuad<T> star_superpotential_direct(const FrameForms<T>& f) {
    const Multiform<T> star_omega = f.star(f.omega());
    FormQuad<T> r;
    for (int k = 0; k < kDim; ++k) {
        Multiform<T> s = 0.5 * wedge(f.up[k], star_omega);
        for (int a = 0; a < kDim; ++a) s -= wedge(f.up[a], f.star(wedge(f.ddn[a], f.up[k])));
        r[k] = s;
    }
    return r;
}

/// The three-term bracket A^k = -(g_a _| dg^a) ^ g^k - (g^a _| dg_a) ^ g^k
/// + (g^k _| dg^a) ^ g_a, so that S^k = 1/2 (A^k - dg^k) and K^k = 1/2 A^k.
template <class T>
FormQuad<T> superpotential_bracket(const FrameForms<T>& f) {
    Multiform<T> trace;
    for (int a = 0; a < kDim; ++a) trace += f.lc(f.dn[a], f.dup[a]) + f.lc(f.up[a], f.ddn[a]);
    FormQuad<T> r;
    for (int k = 0; k < kDim; ++k) {
        Multiform<T> s = -wedge(trace, f.up[k]);
        for (int a = 0; a < kDim; ++a) s += wedge(f.lc(f.up[k], f.dup[a]), f.dn[a]);
        r[k] = s;
    }
    return r;
}

template <class T>
FormQuad<T> kform_of(const FrameForms<T>& f) {
    FormQuad<T> r = superpotential_bracket(f);
    for (auto& x : r) x = 0.5 * x;
    return r;
}

template <class T>
FormQuad<T> star_superpotential_expanded(const FrameForms<T>& f) {
    const FormQuad<T> a = superpotential_bracket(f);
    FormQuad<T> r;
    for (int k = 0; k < kDim; ++k) r[k] = f.star(0.5 * (a[k] - f.dup[k]));
    return r;
}

// ---------------------------------------------------------------------------
// Energy-momentum

/// Derivatives of products that the energy-momentum form needs:
/// d(g^k _| *g^a) and d *g^a.
template <class T>
struct StressDerivatives {
    std::array<FormQuad<T>, kDim> d_contract_star;  // [k][a]
    FormQuad<T> d_star;                             // [a]
};

template <int N>
StressDerivatives<Jet<N - 1>> stress_derivatives(const CoframeJet<N>& c, MetricChoice choice = MetricChoice::Effective) {
    const auto geo = c.geometry(choice);
    StressDerivatives<Jet<N - 1>> s;
    FormQuad<Jet<N>> star_up;
    for (int a = 0; a < kDim; ++a) {
        star_up[a] = hodge_star(c.up[a], geo.metric);
        s.d_star[a] = exterior_derivative(star_up[a]);
    }
    for (int k = 0; k < kDim; ++k)
        for (int a = 0; a < kDim; ++a) s.d_contract_star[k][a] = exterior_derivative(contract_left(c.up[k], star_up[a], geo.metric));
    return s;
}

/// *t^k as the sum of its five groups:
///   1/2 [(g^k _| dg^a) ^ *dg_a - dg^a ^ (g^k _| *dg_a)]
/// + 1/2 d(g^k _| *g^a) ^ *d*g_a + 1/2 (g^k _| d*g^a) ^ *d*g_a
/// + 1/2 dg^k ^ *Omega
/// - 1/4 Omega ^ (g^k _| *Omega) - 1/4 (g^k _| Omega) ^ *Omega.
template <class T>
FormQuad<T> star_stress(const FrameForms<T>& f, const StressDerivatives<T>& d) {
    const Multiform<T> omega = f.omega();
    const Multiform<T> star_omega = f.star(omega);
    FormQuad<T> star_d_dn, star_d_star_dn;
    for (int a = 0; a < kDim; ++a) {
        star_d_dn[a] = f.star(f.ddn[a]);
        star_d_star_dn[a] = kEtaDiag[a] * f.star(d.d_star[a]);
    }
    FormQuad<T> r;
    for (int k = 0; k < kDim; ++k) {
        Multiform<T> s;
        for (int a = 0; a < kDim; ++a) {
            s += 0.5 * (wedge(f.lc(f.up[k], f.dup[a]), star_d_dn[a]) - wedge(f.dup[a], f.lc(f.up[k], star_d_dn[a])));
            s += 0.5 * wedge(d.d_contract_star[k][a], star_d_star_dn[a]);
            s += 0.5 * wedge(f.lc(f.up[k], d.d_star[a]), star_d_star_dn[a]);
        }
        s += 0.5 * wedge(f.dup[k], star_omega);
        s -= 0.25 * wedge(omega, f.lc(f.up[k], star_omega));
        s -= 0.25 * wedge(f.lc(f.up[k], omega), star_omega);
        r[k] = s;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Lagrangian

/// Volume-form coefficient of
///   -1/2 dg^a ^ *dg_a + 1/2 delta g^a ^ *delta g_a + 1/4 Omega ^ *Omega + 1/4 m^2 g_a ^ *g^a.
inline double lagrangian(const CoframeJet<1>& c, double mass, MetricChoice choice = MetricChoice::Effective) {
    const auto geo = c.geometry(choice);
    const auto f = frame_forms(c, choice);
    const auto g = detail::truncate_metric<double>(geo.metric);
    auto pair = [&](const Multiform<double>& a, const Multiform<double>& b) { return wedge(a, hodge_star(b, g))[15]; };
    double l = 0.0;
    for (int a = 0; a < kDim; ++a) {
        const auto dg = f.dup[a].values();
        const auto delta = codifferential(c.up[a], geo.metric, geo.gamma).values();
        l += -0.5 * kEtaDiag[a] * pair(dg, dg) + 0.5 * kEtaDiag[a] * pair(delta, delta);
        l += 0.25 * mass * mass * kEtaDiag[a] * pair(c.up[a].values(), c.up[a].values());
    }
    const auto omega = f.omega().values();
    return l + 0.25 * pair(omega, omega);
}

/// The massless two-term form
///   -1/2 (dg_a ^ g^b) ^ *(dg_b ^ g^a) + 1/4 Omega ^ *Omega.
inline double lagrangian_two_term(const CoframeJet<1>& c, MetricChoice choice = MetricChoice::Effective) {
    const auto f = frame_forms(c, choice);
    const auto g = detail::truncate_metric<double>(f.g);
    double l = 0.0;
    for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) {
            const auto x = wedge(f.ddn[a], f.up[b]).values();
            const auto y = wedge(f.ddn[b], f.up[a]).values();
            l -= 0.5 * wedge(x, hodge_star(y, g))[15];
        }
    const auto omega = f.omega().values();
    return l + 0.25 * wedge(omega, hodge_star(omega, g))[15];
}

// ---------------------------------------------------------------------------
// Point evaluations

struct SuperpotentialResult {
    FormQuad<double> direct;    // *S^k, first expression
    FormQuad<double> expanded;  // *S^k, expanded expression
    double residual = 0.0;
};

inline SuperpotentialResult superpotential(const CoframeJet<1>& c) {
    const auto f = frame_forms(c);
    SuperpotentialResult r;
    r.direct = detail::quad_values(star_superpotential_direct(f));
    r.expanded = detail::quad_values(star_superpotential_expanded(f));
    Residual res;
    for (int k = 0; k < kDim; ++k)
        for (int i = 0; i < kBlades; ++i) res.add(r.direct[k][i], r.expanded[k][i]);
    r.residual = res.value();
    return r;
}

/// t^k as 1-forms.
inline FormQuad<double> stress(const CoframeJet<1>& c) {
    const auto f = frame_forms(c);
    const auto s = star_stress(f, stress_derivatives(c));
    FormQuad<double> r;
    for (int k = 0; k < kDim; ++k) r[k] = hodge_inverse(s[k], f.g).values();
    return r;
}

/// K^k as 2-forms.
inline FormQuad<double> kform(const CoframeJet<1>& c) { return detail::quad_values(kform_of(frame_forms(c))); }

/// *T^k = -d*S^k - *t^k - 1/2 m^2 *g^k, two orders below the coframe jet.
template <int N>
FormQuad<Jet<N - 2>> star_effective_source(const CoframeJet<N>& c, double mass) {
    using R = Jet<N - 2>;
    const auto f = frame_forms(c);
    const auto star_s = star_superpotential_direct(f);
    const auto star_t = star_stress(f, stress_derivatives(c));
    const auto geo = c.geometry(MetricChoice::Effective);
    FormQuad<R> r;
    for (int k = 0; k < kDim; ++k) {
        const auto star_g = hodge_star(c.up[k], geo.metric);
        r[k] = -(exterior_derivative(star_s[k]).template as<R>() + star_t[k].template as<R>() +
                 (0.5 * mass * mass * star_g).template as<R>());
    }
    return r;
}

/// T^k as 1-forms.
inline FormQuad<double> effective_source(const CoframeJet<2>& c, double mass) {
    const auto s = star_effective_source(c, mass);
    const auto g = detail::truncate_metric<double>(MetricExtensor<Jet<2>>::from_covariant(c.eff));
    FormQuad<double> r;
    for (int k = 0; k < kDim; ++k) r[k] = hodge_inverse(s[k].values(), g);
    return r;
}

/// Both sides of
///   1/2 box g^k + 1/2 m^2 g^k = -(T^k + t^k + delta K^k + 1/2 d delta g^k + 1/2 R^k).
/// `printed` uses the Ricci term with unit coefficient instead of 1/2.
struct WaveResidual {
    double residual = 0.0;
    double printed = 0.0;
    double d_delta_term = 0.0;  // max |1/2 d delta g^k|
    FormQuad<double> lhs, rhs;
};

inline WaveResidual wave_residual(const CoframeJet<2>& c, double mass) {
    const auto geo = c.geometry(MetricChoice::Effective);
    const auto f = frame_forms(c);
    const auto split = laplacian_split(c);
    const auto source = effective_source(c, mass);
    const auto t = stress(CoframeJet<1>::from_matrix(truncate<1>(c.h)));
    const auto k_form = kform_of(f);

    WaveResidual w;
    Residual res, printed;
    for (int k = 0; k < kDim; ++k) {
        const auto delta_k = codifferential(k_form[k], geo.metric, geo.gamma).values();
        const auto d_delta = exterior_derivative(codifferential(c.up[k], geo.metric, geo.gamma)).values();
        const auto g_k = c.up[k].values();
        w.lhs[k] = 0.5 * split.covariant[k] + 0.5 * mass * mass * g_k;
        const Multiform<double> common = source[k] + t[k] + delta_k + 0.5 * d_delta;
        w.rhs[k] = -(common + 0.5 * split.ricci_op[k]);
        const Multiform<double> rhs_printed = -(common + split.ricci_op[k]);
        for (int i = 0; i < kBlades; ++i) {
            res.add(w.lhs[k][i], w.rhs[k][i]);
            printed.add(w.lhs[k][i], rhs_printed[i]);
            for (double term : {source[k][i], t[k][i], delta_k[i], 0.5 * d_delta[i], split.ricci_op[k][i],
                                split.covariant[k][i], mass * mass * g_k[i]}) {
                res.add_term(term);
                printed.add_term(term);
            }
            w.d_delta_term = std::max(w.d_delta_term, std::abs(0.5 * d_delta[i]));
        }
    }
    w.residual = res.value();
    w.printed = printed.value();
    return w;
}

/// d(*t^k + *T^k + d*K^k + 1/2 m^2 *g^k) as obtained by applying d to the
/// field equation; `printed` keeps the mass term as -1/2 m^2 g^k under the
/// outer star and reports every coefficient of the result.
struct ConservationResidual {
    double residual = 0.0;
    double printed = 0.0;
};

inline ConservationResidual conservation_residual(const CoframeJet<3>& c, double mass) {
    const auto geo = c.geometry(MetricChoice::Effective);
    const auto f = frame_forms(c);
    const auto star_t = star_stress(f, stress_derivatives(c));
    const auto star_src = star_effective_source(c, mass);
    const auto k_form = kform_of(f);
    const auto g2 = detail::truncate_metric<Jet<2>>(geo.metric);

    Residual res, printed;
    ConservationResidual out;
    for (int k = 0; k < kDim; ++k) {
        const auto star_g = hodge_star(c.up[k], geo.metric);
        const auto d_star_t = exterior_derivative(star_t[k]).values();
        const auto d_star_src = exterior_derivative(star_src[k]).values();
        const auto dd_star_k = exterior_derivative(exterior_derivative(hodge_star(k_form[k], g2))).values();
        const auto d_star_g = exterior_derivative(star_g).values();
        const auto d_g = exterior_derivative(c.up[k]).values();

        const Multiform<double> total = d_star_t + d_star_src + dd_star_k + 0.5 * mass * mass * d_star_g;
        const Multiform<double> total_printed = d_star_t + d_star_src + dd_star_k - 0.5 * mass * mass * d_g;
        res.add(total[15], 0.0);
        for (double term : {d_star_t[15], d_star_src[15], dd_star_k[15], mass * mass * d_star_g[15]}) res.add_term(term);
        for (int i = 0; i < kBlades; ++i) {
            printed.add(total_printed[i], 0.0);
            for (double term : {d_star_t[i], d_star_src[i], dd_star_k[i], mass * mass * d_g[i]}) printed.add_term(term);
        }
    }
    out.residual = res.value();
    out.printed = printed.value();
    return out;
}

/// Apply a constant Lorentz matrix to the coframe labels: g'^a = L^a_b g^b.
template <int N>
CoframeJet<N> lorentz_transform(const CoframeJet<N>& c, const Mat4<double>& lambda) {
    Mat4<Jet<N>> h;
    for (int a = 0; a < kDim; ++a)
        for (int mu = 0; mu < kDim; ++mu) {
            Jet<N> s(0.0);
            for (int b = 0; b < kDim; ++b) s += lambda[a][b] * c.h[b][mu];
            h[a][mu] = s;
        }
    return CoframeJet<N>::from_matrix(h);
}

/// Proper orthochronous Lorentz matrix: boost with rapidity `eta` along x,
/// then a rotation by `phi` in the y-z plane.
inline Mat4<double> boost_rotation(double rapidity, double phi) {
    Mat4<double> b = identity4(), r = identity4();
    b[0][0] = b[1][1] = std::cosh(rapidity);
    b[0][1] = b[1][0] = std::sinh(rapidity);
    r[2][2] = r[3][3] = std::cos(phi);
    r[2][3] = -std::sin(phi);
    r[3][2] = std::sin(phi);
    return matmul(r, b);
}

}  // namespace gaugeforge
