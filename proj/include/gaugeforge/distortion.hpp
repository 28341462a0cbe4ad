/**
 * @file distortion.hpp
 * @brief Distortion extensor fields h over Minkowski spacetime, the coframe
 *        1-forms g^a = h^a_b dx^b, the effective metric they define, and the
 *        exterior-calculus operators built on it (d, codifferentials, the
 *        Hodge and covariant D'Alembertians).
 *
 * The chart is a global Lorentz chart of the background: eta = diag(1,-1,-1,-1)
 * and its connection vanishes. h[a][b] holds h^a_b. The effective metric is
 * G_{mu nu} = eta_{ab} h^a_mu h^b_nu. Its Hodge star is the default
 * whenever the text says "effective".
 */
#pragma once

#include <gaugeforge/connection.hpp>
#include <gaugeforge/expr.hpp>
#include <gaugeforge/multiform.hpp>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <complex>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaugeforge {

/// Which metric a Hodge star, contraction or codifferential refers to.
enum class MetricChoice { Flat, Effective };

/// 4x4 field h^a_b of JetScalars over a Lorentz chart.
class DistortionField {
public:
    DistortionField(std::shared_ptr<const CoordinateChart> chart, std::vector<JetScalar> entries)
        : chart_(std::move(chart)), h_(std::move(entries)) {
        if (h_.size() != 16) throw std::invalid_argument("distortion field needs 16 components");
    }

    /// Empty entries default to the identity.
    static DistortionField parse(std::shared_ptr<const CoordinateChart> chart, const ExprGrid& src,
                                 const ConstantMap& constants = {}) {
        std::vector<JetScalar> e;
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b) {
                const std::string& s = src[a][b];
                e.push_back(parse_expr(s.empty() ? (a == b ? "1" : "0") : s, chart, constants));
            }
        return DistortionField(std::move(chart), std::move(e));
    }

    const JetScalar& component(int a, int b) const { return h_[a * kDim + b]; }
    const CoordinateChart& chart() const { return *chart_; }
    const std::shared_ptr<const CoordinateChart>& chart_ptr() const { return chart_; }

    template <int N>
    Mat4<Jet<N>> jet(const Point& p) const {
        Mat4<Jet<N>> m;
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b) m[a][b] = component(a, b).template jet<N>(p);
        return m;
    }

    Mat4<double> value(const Point& p) const {
        Mat4<double> m{};
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b) m[a][b] = component(a, b).value(p);
        return m;
    }

private:
    std::shared_ptr<const CoordinateChart> chart_;
    std::vector<JetScalar> h_;
};

/// G_{mu nu} = eta_{ab} h^a_mu h^b_nu.
template <class T>
Mat4<T> effective_metric(const Mat4<T>& h) {
    Mat4<T> g = zero_mat<T>();
    for (int mu = 0; mu < kDim; ++mu)
        for (int nu = mu; nu < kDim; ++nu) {
            T s(0.0);
            for (int a = 0; a < kDim; ++a) s += kEtaDiag[a] * (h[a][mu] * h[a][nu]);
            g[mu][nu] = s;
            g[nu][mu] = s;
        }
    return g;
}

// ---------------------------------------------------------------------------
// Extensor square root

/// The eta-symmetric principal square root h of M = eta^-1 g, so that
/// g = h^dagger h. Throws DomainError naming the offending eigenvalue when
/// M has a complex or non-positive eigenvalue.
inline Extensor extensor_sqrt(const MetricExtensor<double>& g) {
    Eigen::Matrix4d m;
    for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) m(a, b) = kEtaDiag[a] * g.components[a][b];
    // A defective eigenvalue (null-wave fields give Jordan blocks) comes back
    // with an imaginary part of order eps^(1/k); only larger ones are genuine.
    Eigen::EigenSolver<Eigen::Matrix4d> es(m, false);
    for (int i = 0; i < kDim; ++i) {
        const std::complex<double> ev = es.eigenvalues()(i);
        if (std::abs(ev.imag()) > 1e-4 * (1.0 + std::abs(ev.real())) || !(ev.real() > 0.0)) {
            std::ostringstream os;
            os << "mixed metric has eigenvalue " << ev.real() << (ev.imag() >= 0 ? "+" : "") << ev.imag()
               << "i; no real eta-symmetric square root";
            throw DomainError(os.str());
        }
    }
    const Eigen::Matrix4d root = m.sqrt();
    Extensor h;
    for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) h.matrix[a][b] = root(a, b);
    return h;
}

/// g = h^dagger h as covariant components: h^T eta h.
inline MetricExtensor<double> metric_from_extensor(const Extensor& h) {
    return MetricExtensor<double>::from_covariant(effective_metric(h.matrix));
}

// ---------------------------------------------------------------------------
// Exterior calculus on jet-valued multiforms

template <int N>
Multiform<Jet<N - 1>> partial(const Multiform<Jet<N>>& a, int axis) {
    Multiform<Jet<N - 1>> r;
    for (int i = 0; i < kBlades; ++i) r[i] = diff(a[i], axis);
    return r;
}

/// dA = sum_mu dx^mu ^ d_mu A.
template <int N>
Multiform<Jet<N - 1>> exterior_derivative(const Multiform<Jet<N>>& a) {
    Multiform<Jet<N - 1>> r;
    for (int mu = 0; mu < kDim; ++mu) r += wedge(Multiform<double>::basis(1 << mu), partial(a, mu));
    return r;
}

/// D_k A = d_k A + (derivation extending dx^i -> -Gamma^i_{k rho} dx^rho).
template <int N, class G>
auto covariant_derivative(const Multiform<Jet<N>>& a, int k, const Tensor3<G>& gamma) {
    Mat4<G> m;
    for (int rho = 0; rho < kDim; ++rho)
        for (int i = 0; i < kDim; ++i) m[rho][i] = -gamma[i][k][rho];
    const auto conn = derivation_extend(m, a);
    using R = decltype(partial(a, k)[0] + conn[0]);
    return (partial(a, k).template as<R>() + conn.template as<R>());
}

/// delta A = -dx^k _| D_k A, contractions with the metric g.
template <int N, class M, class G>
auto codifferential(const Multiform<Jet<N>>& a, const MetricExtensor<M>& g, const Tensor3<G>& gamma) {
    using D = decltype(covariant_derivative(a, 0, gamma)[0]);
    using R = product_t<D, M>;
    Multiform<R> r;
    for (int k = 0; k < kDim; ++k) r -= detail::contract_basis_vector(k, covariant_derivative(a, k, gamma), g.inverse);
    return r;
}

/// A metric jet with its Levi-Civita symbols: the geometry behind one choice
/// of star, contraction and codifferential.
template <int N>
struct Geometry {
    MetricExtensor<Jet<N>> metric;
    Tensor3<Jet<N - 1>> gamma;

    static Geometry from_covariant(const Mat4<Jet<N>>& g) {
        Geometry geo{MetricExtensor<Jet<N>>::from_covariant(g), {}};
        geo.gamma = christoffel_symbols<N>(g, geo.metric.inverse);
        return geo;
    }
    static Geometry flat() { return from_covariant(truncate_const(minkowski())); }

private:
    static Mat4<Jet<N>> truncate_const(const Mat4<double>& m) {
        Mat4<Jet<N>> r;
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j) r[i][j] = Jet<N>(m[i][j]);
        return r;
    }
};

// ---------------------------------------------------------------------------
// Coframes

/// The four coframe 1-forms and the effective metric at a point, as jets.
template <int N>
struct CoframeJet {
    Mat4<Jet<N>> h;                          // h^a_mu
    std::array<Multiform<Jet<N>>, kDim> up;  // g^a
    std::array<Multiform<Jet<N>>, kDim> dn;  // g_a = eta_ab g^b
    Mat4<Jet<N>> eff;                        // G_{mu nu}

    static CoframeJet from_matrix(const Mat4<Jet<N>>& h) {
        CoframeJet c;
        c.h = h;
        for (int a = 0; a < kDim; ++a) {
            c.up[a] = Multiform<Jet<N>>::one_form(h[a]);
            c.dn[a] = kEtaDiag[a] * c.up[a];
        }
        c.eff = effective_metric(h);
        if (!(std::abs(det(values(h))) > 1e-10)) throw DomainError("distortion field is not invertible");
        return c;
    }

    Geometry<N> geometry(MetricChoice choice) const {
        return choice == MetricChoice::Effective ? Geometry<N>::from_covariant(eff) : Geometry<N>::flat();
    }
};

template <int N>
CoframeJet<N> coframe_from_h(const DistortionField& h, const Point& p) {
    return CoframeJet<N>::from_matrix(h.jet<N>(p));
}

/// A p-form field given by one JetScalar per basis p-blade (lexicographic).
class FormField {
public:
    FormField(int grade, std::vector<JetScalar> components) : grade_(grade), c_(std::move(components)) {
        if (grade < 0 || grade > kDim) throw std::invalid_argument("form grade must be in 0..4");
        if (static_cast<int>(c_.size()) != binomial(grade)) throw std::invalid_argument("wrong number of form components");
    }

    static FormField parse(std::shared_ptr<const CoordinateChart> chart, int grade, const std::vector<std::string>& src,
                           const ConstantMap& constants = {}) {
        std::vector<JetScalar> c;
        for (const auto& s : src) c.push_back(parse_expr(s, chart, constants));
        return FormField(grade, std::move(c));
    }

    static int binomial(int p) {
        static constexpr std::array<int, 5> k{1, 4, 6, 4, 1};
        return k[p];
    }

    int grade() const { return grade_; }

    template <int N>
    Multiform<Jet<N>> jet(const Point& p) const {
        Multiform<Jet<N>> m;
        int k = 0;
        for (int i = 0; i < kBlades; ++i)
            if (blade::grade(blade::kMaskOf[i]) == grade_) m[i] = c_[k++].template jet<N>(p);
        return m;
    }

private:
    int grade_;
    std::vector<JetScalar> c_;
};

inline Multiform<double> d_form(const FormField& a, const Point& p) { return exterior_derivative(a.jet<1>(p)).values(); }

/// delta of a form field with respect to a metric field on the same chart.
inline Multiform<double> codifferential(const FormField& a, const MetricField& metric, const Point& p) {
    const auto geo = Geometry<2>::from_covariant(metric.jet<2>(p));
    return codifferential(a.jet<1>(p), geo.metric, geo.gamma).values();
}

// ---------------------------------------------------------------------------
// D'Alembertians

struct LaplacianSplit {
    std::array<Multiform<double>, kDim> hodge;      // (-delta d - d delta) g^k
    std::array<Multiform<double>, kDim> covariant;  // G^{ab} D_a D_b phi^k_i dx^i
    std::array<Multiform<double>, kDim> ricci_op;   // phi^k_i R^i_nu dx^nu
    double residual = 0.0;
};

/// G^{ab} D_a D_b w_i dx^i for a 1-form with order-2 jet components.
template <int N>
Multiform<Jet<N - 2>> covariant_dalembertian(const Multiform<Jet<N>>& w, const Geometry<N>& geo) {
    RelativeTensor<Jet<N>> t = RelativeTensor<Jet<N>>::zero(0, 1);
    for (int i = 0; i < kDim; ++i) t.c[i] = w[1 + i];
    const auto d1 = covderiv_relative(t, geo.gamma);        // D_b w_i, Jet<N-1>
    const auto d2 = covderiv_relative(d1, geo.gamma);       // D_a D_b w_i, Jet<N-2>
    Multiform<Jet<N - 2>> r;
    for (int i = 0; i < kDim; ++i) {
        Jet<N - 2> s(0.0);
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b)
                s += geo.metric.inverse[a][b].template truncate<N - 2>() * d2.c[(a * kDim + b) * kDim + i];
        r[1 + i] = s;
    }
    return r;
}

/// Ricci operator on a 1-form: w_i R^i_nu dx^nu, with R_{mu a} = R_mu^rho_{a rho}.
template <class T, class M>
Multiform<double> ricci_operator(const Multiform<T>& w, const Mat4<double>& ricci, const Mat4<M>& inverse) {
    Multiform<double> r;
    for (int nu = 0; nu < kDim; ++nu) {
        double s = 0.0;
        for (int i = 0; i < kDim; ++i)
            for (int l = 0; l < kDim; ++l) s += value_of(w[1 + i]) * value_of(inverse[i][l]) * ricci[l][nu];
        r[1 + nu] = s;
    }
    return r;
}

template <int N>
Multiform<Jet<N - 2>> hodge_dalembertian(const Multiform<Jet<N>>& w, const Geometry<N>& geo) {
    const auto dw = exterior_derivative(w);
    const auto delta_d = codifferential(dw, geo.metric, geo.gamma);
    const auto delta_w = codifferential(w, geo.metric, geo.gamma);
    const auto d_delta = exterior_derivative(delta_w);
    using R = Jet<N - 2>;
    return -(delta_d.template as<R>() + d_delta.template as<R>());
}

/// Split of the Hodge D'Alembertian of a family of 1-forms over a metric jet.
inline LaplacianSplit laplacian_split(const std::array<Multiform<Jet<2>>, kDim>& forms, const Mat4<Jet<2>>& metric) {
    const auto geo = Geometry<2>::from_covariant(metric);
    Mat4<double> ricci{};
    {
        const auto riem = riemann_tensor<1>(geo.gamma);
        for (int m = 0; m < kDim; ++m)
            for (int a = 0; a < kDim; ++a)
                for (int r = 0; r < kDim; ++r) ricci[m][a] += riem[m][r][a][r].value();
    }
    LaplacianSplit out;
    Residual res;
    for (int k = 0; k < kDim; ++k) {
        out.hodge[k] = hodge_dalembertian(forms[k], geo).values();
        out.covariant[k] = covariant_dalembertian(forms[k], geo).values();
        out.ricci_op[k] = ricci_operator(forms[k], ricci, geo.metric.inverse);
        for (int i = 0; i < kBlades; ++i) {
            res.add(out.hodge[k][i], out.covariant[k][i] + out.ricci_op[k][i]);
            res.add_term(out.covariant[k][i]);
            res.add_term(out.ricci_op[k][i]);
        }
    }
    out.residual = res.value();
    return out;
}

inline LaplacianSplit laplacian_split(const CoframeJet<2>& c) { return laplacian_split(c.up, c.eff); }

/// Coordinate coframe dx^k over a metric field: checks the split for the
/// metric itself.
inline LaplacianSplit laplacian_split(const MetricField& metric, const Point& p) {
    std::array<Multiform<Jet<2>>, kDim> forms;
    for (int k = 0; k < kDim; ++k) forms[k] = Multiform<Jet<2>>::basis(1 << k);
    return laplacian_split(forms, metric.jet<2>(p));
}

// ---------------------------------------------------------------------------
// Gauge-type divergences of the coframe

/// delta of each coframe form with the chosen metric, values only.
inline std::array<double, kDim> coframe_divergence(const DistortionField& h, const Point& p, MetricChoice choice) {
    const auto c = coframe_from_h<2>(h, p);
    const auto geo = c.geometry(choice);
    std::array<double, kDim> r{};
    for (int a = 0; a < kDim; ++a) r[a] = codifferential(c.up[a], geo.metric, geo.gamma)[0].value();
    return r;
}

/// -eta^{kb} d_k h^a_b: the index form of the flat codifferential.
inline std::array<double, kDim> flat_divergence_index_form(const DistortionField& h, const Point& p) {
    const auto hj = h.jet<1>(p);
    std::array<double, kDim> r{};
    for (int a = 0; a < kDim; ++a)
        for (int k = 0; k < kDim; ++k) r[a] -= kEtaDiag[k] * hj[a][k].d(k);
    return r;
}

/// -eta^{al} d_k h^k_l: the divergence form written with the field's first
/// index contracted, equal to the above for eta-symmetric h.
inline std::array<double, kDim> restriction_divergence(const DistortionField& h, const Point& p) {
    const auto hj = h.jet<1>(p);
    std::array<double, kDim> r{};
    for (int a = 0; a < kDim; ++a)
        for (int k = 0; k < kDim; ++k) r[a] -= kEtaDiag[a] * hj[k][a].d(k);
    return r;
}

// ---------------------------------------------------------------------------
// Random fields for identity sweeps

/// I + eps p(x) with p of degree <= `degree` (1 or 2) and coefficients in
/// [-0.1, 0.1]. With `symmetric` the field is eta-self-adjoint:
/// h^b_a = eta_aa h^a_b eta_bb.
inline ExprGrid random_distortion_grid(std::mt19937_64& rng, int degree = 2, double eps = 1.0, bool symmetric = false) {
    static const std::array<std::string, kDim> names{"t", "x", "y", "z"};
    std::uniform_real_distribution<double> coef(-0.1, 0.1);
    ExprGrid grid;
    for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) {
            if (symmetric && b < a) continue;
            std::string s = a == b ? "1" : "0";
            auto term = [&](const std::string& mono) {
                s += "+(" + format_coefficient(eps * coef(rng)) + ")" + (mono.empty() ? "" : "*" + mono);
            };
            term("");
            for (int i = 0; i < kDim; ++i) term(names[i]);
            if (degree >= 2)
                for (int i = 0; i < kDim; ++i)
                    for (int j = i; j < kDim; ++j) term(names[i] + "*" + names[j]);
            grid[a][b] = s;
        }
    if (symmetric)
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < a; ++b)
                grid[a][b] = kEtaDiag[a] * kEtaDiag[b] > 0 ? grid[b][a] : "-(" + grid[b][a] + ")";
    return grid;
}

}  // namespace gaugeforge
