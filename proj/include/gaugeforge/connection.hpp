/**
 * @file connection.hpp
 * @brief Levi-Civita connections of two metrics on one chart, their curvature,
 *        and the relations between them (strain, contorsion, non-metricity,
 *        curvature and Ricci gaps, density identities).
 *
 * Index conventions:
 *  - gamma[rho][alpha][beta] = Gamma^rho_{alpha beta};
 *  - riemann[mu][rho][alpha][beta] = R_mu^rho_{alpha beta}
 *      = d_alpha Gamma^rho_{beta mu} - d_beta Gamma^rho_{alpha mu}
 *        + Gamma^rho_{alpha s} Gamma^s_{beta mu} - Gamma^rho_{beta s} Gamma^s_{alpha mu};
 *  - ricci[mu][alpha] = R_mu^rho_{alpha rho}. This contraction is minus the
 *    usual Ricci tensor.
 *  - Tensor components are stored flat, upper indices first, then lower.
 *    Covariant derivatives put the derivative index in front.
 */
#pragma once

#include <gaugeforge/expr.hpp>
#include <gaugeforge/linalg.hpp>
#include <gaugeforge/multiform.hpp>
#include <gaugeforge/sampling.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gaugeforge {

using ExprGrid = std::array<std::array<std::string, kDim>, kDim>;

/// Symmetric 4x4 field of JetScalars; only the upper triangle is stored.
class MetricField {
public:
    MetricField(std::shared_ptr<const CoordinateChart> chart, std::vector<JetScalar> upper)
        : chart_(std::move(chart)), c_(std::move(upper)) {
        if (c_.size() != 10) throw std::invalid_argument("metric needs 10 independent components");
    }

    /// Parses a grid of expressions. Empty lower entries take the upper
    /// entry; a non-empty lower entry must match its upper entry textually.
    static MetricField parse(std::shared_ptr<const CoordinateChart> chart, const ExprGrid& src,
                             const ConstantMap& constants = {}) {
        std::vector<JetScalar> upper;
        for (int i = 0; i < kDim; ++i)
            for (int j = i; j < kDim; ++j) {
                if (j > i && !src[j][i].empty() && src[j][i] != src[i][j])
                    throw std::invalid_argument("metric[" + std::to_string(j) + "][" + std::to_string(i) +
                                                "] differs from its transpose entry");
                const std::string& s = src[i][j].empty() && j > i ? src[j][i] : src[i][j];
                upper.push_back(parse_expr(s.empty() ? "0" : s, chart, constants));
            }
        return MetricField(std::move(chart), std::move(upper));
    }

    static int slot(int i, int j) {
        if (i > j) std::swap(i, j);
        return i * kDim - i * (i - 1) / 2 + (j - i);
    }

    const JetScalar& component(int i, int j) const { return c_[slot(i, j)]; }
    const CoordinateChart& chart() const { return *chart_; }
    const std::shared_ptr<const CoordinateChart>& chart_ptr() const { return chart_; }

    template <int N>
    Mat4<Jet<N>> jet(const Point& p) const {
        Mat4<Jet<N>> m;
        for (int i = 0; i < kDim; ++i)
            for (int j = i; j < kDim; ++j) m[i][j] = m[j][i] = component(i, j).template jet<N>(p);
        return m;
    }

    Mat4<double> value(const Point& p) const {
        Mat4<double> m{};
        for (int i = 0; i < kDim; ++i)
            for (int j = i; j < kDim; ++j) m[i][j] = m[j][i] = component(i, j).value(p);
        return m;
    }

    bool lorentzian_at(const Point& p) const {
        try {
            return has_lorentz_signature(value(p));
        } catch (const DomainError&) {
            return false;
        }
    }

private:
    std::shared_ptr<const CoordinateChart> chart_;
    std::vector<JetScalar> c_;
};

/// Gamma^rho_{alpha beta} from a metric jet and its inverse (one order lost).
template <int N>
Tensor3<Jet<N - 1>> christoffel_symbols(const Mat4<Jet<N>>& g, const Mat4<Jet<N>>& inv) {
    std::array<Mat4<Jet<N - 1>>, kDim> dg;  // dg[s][a][b] = d_s g_ab
    for (int s = 0; s < kDim; ++s) dg[s] = diff(g, s);
    Tensor3<Jet<N - 1>> gamma = zero_tensor3<Jet<N - 1>>();
    for (int a = 0; a < kDim; ++a)
        for (int b = a; b < kDim; ++b)
            for (int s = 0; s < kDim; ++s) {
                const Jet<N - 1> lowered = 0.5 * (dg[a][b][s] + dg[b][a][s] - dg[s][a][b]);
                for (int r = 0; r < kDim; ++r) gamma[r][a][b] += inv[r][s].template truncate<N - 1>() * lowered;
            }
    for (int r = 0; r < kDim; ++r)
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < a; ++b) gamma[r][a][b] = gamma[r][b][a];
    return gamma;
}

template <int N>
Tensor3<Jet<N - 1>> christoffel_symbols(const Mat4<Jet<N>>& g) {
    return christoffel_symbols<N>(g, inverse(g));
}

/// R_mu^rho_{alpha beta} from Gamma jets of order M >= 1.
template <int M>
Tensor4<Jet<M - 1>> riemann_tensor(const Tensor3<Jet<M>>& gamma) {
    using R = Jet<M - 1>;
    std::array<Tensor3<R>, kDim> dgam;  // dgam[s][rho][a][b]
    for (int s = 0; s < kDim; ++s)
        for (int r = 0; r < kDim; ++r) dgam[s][r] = diff(gamma[r], s);
    const Tensor3<R> g = truncate<M - 1>(gamma);
    Tensor4<R> out = zero_tensor4<R>();
    for (int mu = 0; mu < kDim; ++mu)
        for (int rho = 0; rho < kDim; ++rho)
            for (int a = 0; a < kDim; ++a)
                for (int b = a + 1; b < kDim; ++b) {
                    R v = dgam[a][rho][b][mu] - dgam[b][rho][a][mu];
                    for (int s = 0; s < kDim; ++s) v += g[rho][a][s] * g[s][b][mu] - g[rho][b][s] * g[s][a][mu];
                    out[mu][rho][a][b] = v;
                    out[mu][rho][b][a] = -v;
                }
    return out;
}

template <class T>
Mat4<T> ricci_contraction(const Tensor4<T>& riem) {
    Mat4<T> r = zero_mat<T>();
    for (int mu = 0; mu < kDim; ++mu)
        for (int a = 0; a < kDim; ++a)
            for (int rho = 0; rho < kDim; ++rho) r[mu][a] += riem[mu][rho][a][rho];
    return r;
}

struct ConnectionPoint {
    Tensor3<double> gamma{};   // Gamma^rho_{alpha beta}
    Tensor4<double> dgamma{};  // dgamma[s][rho][alpha][beta] = d_s Gamma^rho_{alpha beta}
};

inline ConnectionPoint christoffel(const MetricField& metric, const Point& p) {
    const auto g = metric.jet<2>(p);
    const auto gamma = christoffel_symbols<2>(g);
    ConnectionPoint c;
    for (int r = 0; r < kDim; ++r)
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b) {
                c.gamma[r][a][b] = gamma[r][a][b].value();
                for (int s = 0; s < kDim; ++s) c.dgamma[s][r][a][b] = gamma[r][a][b].d(s);
            }
    return c;
}

struct CurvaturePoint {
    Tensor4<double> riemann{};
    Mat4<double> ricci{};
};

inline CurvaturePoint curvature(const MetricField& metric, const Point& p) {
    const auto riem = riemann_tensor<1>(christoffel_symbols<2>(metric.jet<2>(p)));
    CurvaturePoint c;
    for (int m = 0; m < kDim; ++m)
        for (int r = 0; r < kDim; ++r)
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b) c.riemann[m][r][a][b] = riem[m][r][a][b].value();
    c.ricci = ricci_contraction(c.riemann);
    return c;
}

// ---------------------------------------------------------------------------
// Relative tensors

/// Components of a relative tensor of type (upper, lower) and weight w.
template <class T>
struct RelativeTensor {
    int upper = 0;
    int lower = 0;
    double weight = 0.0;
    std::vector<T> c;

    int rank() const { return upper + lower; }
    static std::size_t size_for(int rank) { return std::size_t{1} << (2 * rank); }

    static RelativeTensor zero(int upper, int lower, double weight = 0.0) {
        return RelativeTensor{upper, lower, weight, std::vector<T>(size_for(upper + lower), T(0.0))};
    }
};

namespace detail {

inline std::size_t stride(int rank, int position) { return std::size_t{1} << (2 * (rank - 1 - position)); }

inline int digit(std::size_t flat, int rank, int position) { return static_cast<int>((flat / stride(rank, position)) % kDim); }

}  // namespace detail

/// nabla_k A: derivative index first, then the indices of A, with the
/// connection L^mu_{nu k} given by `gamma[mu][nu][k]`:
///   d_k A + sum_upper L^{mu_p}_{i k} A^{..i..} - sum_lower L^i_{nu_q k} A_{..i..} - w L^s_{k s} A.
template <int N, class G>
auto covderiv_relative(const RelativeTensor<Jet<N>>& a, const Tensor3<G>& gamma) {
    static_assert(N >= 1, "need a first-order jet to differentiate");
    using R = product_t<G, Jet<N - 1>>;
    const int rank = a.rank();
    if (a.c.size() != RelativeTensor<Jet<N>>::size_for(rank)) throw std::invalid_argument("inconsistent valence");
    RelativeTensor<R> out = RelativeTensor<R>::zero(a.upper, a.lower + 1, a.weight);
    const std::size_t n = a.c.size();
    for (int k = 0; k < kDim; ++k) {
        G trace = G(0.0);
        for (int s = 0; s < kDim; ++s) trace += gamma[s][k][s];
        for (std::size_t i = 0; i < n; ++i) {
            R v = convert<R>(diff(a.c[i], k));
            for (int pos = 0; pos < rank; ++pos) {
                const int d = detail::digit(i, rank, pos);
                const std::size_t base = i - d * detail::stride(rank, pos);
                for (int j = 0; j < kDim; ++j) {
                    const R comp = convert<R>(a.c[base + j * detail::stride(rank, pos)]);
                    if (pos < a.upper) v += convert<R>(gamma[d][j][k]) * comp;
                    else v -= convert<R>(gamma[j][d][k]) * comp;
                }
            }
            if (a.weight != 0.0) v -= a.weight * convert<R>(trace) * convert<R>(a.c[i]);
            out.c[k * n + i] = v;
        }
    }
    return out;
}

/// Transforms components under a linear chart change with constant
/// jacobian[a][b] = d x'^a / d x^b, with J = det(jacobian):
///   A' = J^w (dx'/dx)...(dx/dx')... A.
inline RelativeTensor<double> transform_relative(const RelativeTensor<double>& a, const Mat4<double>& jacobian) {
    const Mat4<double> inv = inverse(jacobian);  // inv[b][a] = d x^b / d x'^a
    const double scale = std::pow(det(jacobian), a.weight);
    const int rank = a.rank();
    RelativeTensor<double> out = RelativeTensor<double>::zero(a.upper, a.lower, a.weight);
    const std::size_t n = a.c.size();
    for (std::size_t o = 0; o < n; ++o)
        for (std::size_t i = 0; i < n; ++i) {
            double f = scale * a.c[i];
            if (f == 0.0) continue;
            for (int pos = 0; pos < rank && f != 0.0; ++pos) {
                const int no = detail::digit(o, rank, pos), ni = detail::digit(i, rank, pos);
                f *= pos < a.upper ? jacobian[no][ni] : inv[ni][no];
            }
            out.c[o] += f;
        }
    return out;
}

template <class T>
RelativeTensor<T> from_matrix(const Mat4<T>& m, int upper, int lower, double weight = 0.0) {
    RelativeTensor<T> t = RelativeTensor<T>::zero(upper, lower, weight);
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) t.c[i * kDim + j] = m[i][j];
    return t;
}

template <class T>
RelativeTensor<T> from_tensor3(const Tensor3<T>& m, int upper, int lower, double weight = 0.0) {
    RelativeTensor<T> t = RelativeTensor<T>::zero(upper, lower, weight);
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            for (int k = 0; k < kDim; ++k) t.c[(i * kDim + j) * kDim + k] = m[i][j][k];
    return t;
}

// ---------------------------------------------------------------------------
// Two metrics on one chart

/// Residual normalised by the size of the terms: max|diff| / (1 + max|terms|).
class Residual {
public:
    void add(double lhs, double rhs) {
        diff_ = std::max(diff_, std::abs(lhs - rhs));
        scale_ = std::max({scale_, std::abs(lhs), std::abs(rhs)});
    }
    void add_term(double term) { scale_ = std::max(scale_, std::abs(term)); }
    double value() const { return diff_ / (1.0 + scale_); }

private:
    double diff_ = 0.0;
    double scale_ = 0.0;
};

struct TwoConnectionPoint {
    Tensor3<double> S{};  // S^rho_{alpha beta}
    Tensor3<double> K{};  // K^rho_{alpha beta}
    Tensor3<double> Q{};  // Q_{alpha beta sigma}
    double kappa = 1.0;
    Vec4<double> dkappa{};
};

/// Everything the pair identities need at one point, computed once.
struct PairEvaluation {
    Mat4<Jet<2>> g, g0, inv, inv0;
    Jet<2> det_g, det_g0;
    Tensor3<Jet<1>> gamma, gamma0, K;
    Tensor4<double> riemann, riemann0;

    PairEvaluation(const MetricField& metric, const MetricField& background, const Point& p)
        : g(metric.jet<2>(p)), g0(background.jet<2>(p)), inv(inverse(g)), inv0(inverse(g0)), det_g(det(g)),
          det_g0(det(g0)) {
        gamma = christoffel_symbols<2>(g, inv);
        gamma0 = christoffel_symbols<2>(g0, inv0);
        K = zero_tensor3<Jet<1>>();
        for (int r = 0; r < kDim; ++r)
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b) K[r][a][b] = gamma[r][a][b] - gamma0[r][a][b];
        const auto rj = riemann_tensor<1>(gamma);
        const auto rj0 = riemann_tensor<1>(gamma0);
        for (int m = 0; m < kDim; ++m)
            for (int r = 0; r < kDim; ++r)
                for (int a = 0; a < kDim; ++a)
                    for (int b = 0; b < kDim; ++b) {
                        riemann[m][r][a][b] = rj[m][r][a][b].value();
                        riemann0[m][r][a][b] = rj0[m][r][a][b].value();
                    }
    }

    /// kappa = sqrt(det g / det g0), as a jet.
    Jet<2> kappa() const {
        const Jet<2> ratio = det_g / det_g0;
        if (!(ratio.value() > 0.0)) throw DomainError("det g / det g0 is not positive");
        return sqrt(ratio);
    }

    /// Q_{alpha beta sigma} = -D_alpha g0_{beta sigma}, value only.
    Tensor3<double> nonmetricity() const {
        const auto d = covderiv_relative(from_matrix(g0, 0, 2), gamma);
        Tensor3<double> q{};
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b)
                for (int s = 0; s < kDim; ++s) q[a][b][s] = -d.c[(a * kDim + b) * kDim + s].value();
        return q;
    }

    /// Covariant derivative of K^rho_{beta mu} (weight 0) with Gamma or Gamma0,
    /// as dk[alpha][rho][beta][mu].
    Tensor4<double> derivative_of_K(bool flat) const {
        const auto d = covderiv_relative(from_tensor3(K, 1, 2), flat ? gamma0 : gamma);
        Tensor4<double> out{};
        for (int a = 0; a < kDim; ++a)
            for (int r = 0; r < kDim; ++r)
                for (int b = 0; b < kDim; ++b)
                    for (int m = 0; m < kDim; ++m) out[a][r][b][m] = d.c[((a * kDim + r) * kDim + b) * kDim + m].value();
        return out;
    }

    Tensor3<double> K_values() const {
        Tensor3<double> k{};
        for (int r = 0; r < kDim; ++r)
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b) k[r][a][b] = K[r][a][b].value();
        return k;
    }
};

inline TwoConnectionPoint decompose_connection(const MetricField& metric, const MetricField& background, const Point& p) {
    const PairEvaluation e(metric, background, p);
    TwoConnectionPoint t;
    t.K = e.K_values();
    for (int r = 0; r < kDim; ++r)
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b) t.S[r][a][b] = 2.0 * t.K[r][a][b];
    t.Q = e.nonmetricity();
    const Jet<2> kap = e.kappa();
    t.kappa = kap.value();
    for (int s = 0; s < kDim; ++s) t.dkappa[s] = kap.d(s);
    return t;
}

struct CurvatureGap {
    Tensor4<double> J{};  // J_mu^rho_{alpha beta}, stored J[mu][rho][alpha][beta]
    double residual_riemann = 0.0;
    double residual_ricci = 0.0;
    double residual_gap_forms = 0.0;
};

namespace detail {

/// Both expressions for J_mu^rho_{alpha beta} and both for J_{mu alpha}.
struct GapTerms {
    Tensor4<double> J_flat{}, J_curved{};
    Mat4<double> Jr_flat{}, Jr_curved{};
};

inline GapTerms gap_terms(const PairEvaluation& e) {
    const Tensor3<double> K = e.K_values();
    const Tensor4<double> dK0 = e.derivative_of_K(true);   // [alpha][rho][beta][mu]
    const Tensor4<double> dK = e.derivative_of_K(false);
    GapTerms t;
    for (int mu = 0; mu < kDim; ++mu)
        for (int rho = 0; rho < kDim; ++rho)
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b) {
                    double f = dK0[a][rho][b][mu], c = dK[a][rho][b][mu];
                    for (int s = 0; s < kDim; ++s) {
                        f -= K[rho][b][s] * K[s][a][mu];
                        c += -K[rho][a][s] * K[s][b][mu] + K[s][a][b] * K[rho][s][mu];
                    }
                    t.J_flat[mu][rho][a][b] = f;
                    t.J_curved[mu][rho][a][b] = c;
                }
    for (int mu = 0; mu < kDim; ++mu)
        for (int a = 0; a < kDim; ++a) {
            double f = 0.0, c = 0.0;
            for (int rho = 0; rho < kDim; ++rho) {
                f += dK0[a][rho][rho][mu] - dK0[rho][rho][a][mu];
                c += dK[a][rho][rho][mu] - dK[rho][rho][a][mu];
                for (int s = 0; s < kDim; ++s) {
                    f += K[rho][a][s] * K[s][rho][mu] - K[rho][rho][s] * K[s][a][mu];
                    c += -K[rho][s][a] * K[s][rho][mu] + K[rho][rho][s] * K[s][a][mu];
                }
            }
            t.Jr_flat[mu][a] = f;
            t.Jr_curved[mu][a] = c;
        }
    return t;
}

}  // namespace detail

inline CurvatureGap curvature_gap(const PairEvaluation& e) {
    const auto t = detail::gap_terms(e);
    CurvatureGap gap;
    gap.J = t.J_flat;
    Residual forms, rriem, rric;
    for (int mu = 0; mu < kDim; ++mu)
        for (int rho = 0; rho < kDim; ++rho)
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b) {
                    forms.add(t.J_flat[mu][rho][a][b], t.J_curved[mu][rho][a][b]);
                    // J_[alpha beta] is the plain difference J_ab - J_ba
                    const double anti = t.J_flat[mu][rho][a][b] - t.J_flat[mu][rho][b][a];
                    rriem.add(e.riemann[mu][rho][a][b], e.riemann0[mu][rho][a][b] + anti);
                    rriem.add_term(e.riemann0[mu][rho][a][b]);
                    rriem.add_term(anti);
                }
    const Mat4<double> ric = ricci_contraction(e.riemann), ric0 = ricci_contraction(e.riemann0);
    for (int mu = 0; mu < kDim; ++mu)
        for (int a = 0; a < kDim; ++a) {
            rric.add(ric[mu][a], ric0[mu][a] + t.Jr_flat[mu][a]);
            rric.add(ric[mu][a], ric0[mu][a] + t.Jr_curved[mu][a]);
            rric.add_term(t.Jr_flat[mu][a]);
        }
    gap.residual_riemann = rriem.value();
    gap.residual_ricci = rric.value();
    gap.residual_gap_forms = forms.value();
    return gap;
}

inline CurvatureGap curvature_gap(const MetricField& metric, const MetricField& background, const Point& p) {
    return curvature_gap(PairEvaluation(metric, background, p));
}

/// One named identity and its normalised residual at a point.
struct NamedResidual {
    std::string name;
    double value = 0.0;
};

/// Density identities: the four determinant lines, the three contorsion
/// traces, and the symmetric-trace pair.
inline std::vector<NamedResidual> density_identities(const PairEvaluation& e) {
    std::vector<NamedResidual> out;
    const Tensor3<double> K = e.K_values();

    // determinant lines: weight +1 for sqrt(-det), -1 for its inverse
    const Jet<2> sg0 = sqrt(-e.det_g0), sg = sqrt(-e.det_g);
    auto scalar_line = [&](const Jet<2>& density, double weight, const Tensor3<Jet<1>>& gamma, const char* name) {
        RelativeTensor<Jet<2>> t{0, 0, weight, {density}};
        const auto d = covderiv_relative(t, gamma);
        Residual r;
        for (int k = 0; k < kDim; ++k) {
            r.add(d.c[k].value(), 0.0);
            r.add_term(density.d(k));
        }
        out.push_back({name, r.value()});
    };
    scalar_line(sg0, 1.0, e.gamma0, "density-flat");
    scalar_line(1.0 / sg0, -1.0, e.gamma0, "inverse-density-flat");
    scalar_line(sg, 1.0, e.gamma, "density-curved");
    scalar_line(1.0 / sg, -1.0, e.gamma, "inverse-density-curved");

    const Jet<2> kap = e.kappa();

    // line 1: K^r_{r s} = -1/2 g0^{ab} D_s g0_ab = 1/2 g^{ab} D0_s g_ab = d_s kappa / kappa
    {
        const auto dg0 = covderiv_relative(from_matrix(e.g0, 0, 2), e.gamma);
        const auto dg = covderiv_relative(from_matrix(e.g, 0, 2), e.gamma0);
        Residual r;
        for (int s = 0; s < kDim; ++s) {
            double tr = 0.0, a = 0.0, b = 0.0;
            for (int rho = 0; rho < kDim; ++rho) tr += K[rho][rho][s];
            for (int i = 0; i < kDim; ++i)
                for (int j = 0; j < kDim; ++j) {
                    a += -0.5 * e.inv0[i][j].value() * dg0.c[(s * kDim + i) * kDim + j].value();
                    b += 0.5 * e.inv[i][j].value() * dg.c[(s * kDim + i) * kDim + j].value();
                }
            const double c = kap.d(s) / kap.value();
            r.add(tr, a);
            r.add(tr, b);
            r.add(tr, c);
        }
        out.push_back({"trace-contorsion", r.value()});
    }

    // line 2: g^{ab} K^r_ab = -(1/kappa) D0_s(kappa g^{rs}) = -(1/sqrt(-g)) D0_s(sqrt(-g) g^{rs})
    {
        Mat4<Jet<2>> kg, dg;
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j) {
                kg[i][j] = kap * e.inv[i][j];
                dg[i][j] = sg * e.inv[i][j];
            }
        const auto d1 = covderiv_relative(from_matrix(kg, 2, 0, 0.0), e.gamma0);
        const auto d2 = covderiv_relative(from_matrix(dg, 2, 0, 1.0), e.gamma0);
        Residual r;
        for (int rho = 0; rho < kDim; ++rho) {
            double lhs = 0.0, a = 0.0, b = 0.0;
            for (int i = 0; i < kDim; ++i)
                for (int j = 0; j < kDim; ++j) lhs += e.inv[i][j].value() * K[rho][i][j];
            for (int s = 0; s < kDim; ++s) {
                a += d1.c[(s * kDim + rho) * kDim + s].value();
                b += d2.c[(s * kDim + rho) * kDim + s].value();
            }
            r.add(lhs, -a / kap.value());
            r.add(lhs, -b / sg.value());
        }
        out.push_back({"trace-metric-contorsion", r.value()});
    }

    // line 3: g0^{ab} K^r_ab = kappa D_s(kappa^-1 g0^{rs})
    {
        Mat4<Jet<2>> m;
        const Jet<2> ik = 1.0 / kap;
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j) m[i][j] = ik * e.inv0[i][j];
        const auto d = covderiv_relative(from_matrix(m, 2, 0), e.gamma);
        Residual r;
        for (int rho = 0; rho < kDim; ++rho) {
            double lhs = 0.0, rhs = 0.0;
            for (int i = 0; i < kDim; ++i)
                for (int j = 0; j < kDim; ++j) lhs += e.inv0[i][j].value() * K[rho][i][j];
            for (int s = 0; s < kDim; ++s) rhs += d.c[(s * kDim + rho) * kDim + s].value();
            r.add(lhs, kap.value() * rhs);
        }
        out.push_back({"trace-background-contorsion", r.value()});
    }

    // D0_a K^r_{r b} = D0_b K^r_{r a}, and the same with D
    for (bool flat : {true, false}) {
        const Tensor4<double> dK = e.derivative_of_K(flat);
        Residual r;
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b) {
                double x = 0.0, y = 0.0;
                for (int rho = 0; rho < kDim; ++rho) {
                    x += dK[a][rho][rho][b];
                    y += dK[b][rho][rho][a];
                }
                r.add(x, y);
            }
        out.push_back({flat ? "symmetric-trace-flat" : "symmetric-trace-curved", r.value()});
    }
    return out;
}

/// Strain and non-metricity relations, the two contorsion expressions,
/// metric compatibility and Riemann antisymmetry.
inline std::vector<NamedResidual> strain_identities(const PairEvaluation& e) {
    std::vector<NamedResidual> out;
    const Tensor3<double> K = e.K_values();
    Tensor3<double> S{};
    for (int r = 0; r < kDim; ++r)
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b) S[r][a][b] = 2.0 * K[r][a][b];
    const Tensor3<double> Q = e.nonmetricity();
    const Mat4<double> g0 = values(e.g0), inv0 = values(e.inv0), inv = values(e.inv);

    Tensor3<double> S_low{};  // S_{a b s} = g0_{r s} S^r_{ab}
    for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b)
            for (int s = 0; s < kDim; ++s)
                for (int r = 0; r < kDim; ++r) S_low[a][b][s] += g0[r][s] * S[r][a][b];

    Residual q_from_s, s_from_q, cyclic;
    for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b)
            for (int s = 0; s < kDim; ++s) {
                double q = 0.0, sr = 0.0;
                for (int m = 0; m < kDim; ++m) {
                    q += 0.5 * (g0[m][s] * S[m][a][b] + g0[b][m] * S[m][a][s]);
                    sr += inv0[a][m] * (Q[b][s][m] + Q[s][m][b] - Q[m][b][s]);
                }
                q_from_s.add(Q[a][b][s], q);
                // second line, read with indices (rho, alpha, beta) -> (a, b, s)
                s_from_q.add(S[a][b][s], sr);
                cyclic.add(Q[a][b][s] + Q[s][a][b] + Q[b][s][a], S_low[a][b][s] + S_low[s][a][b] + S_low[b][s][a]);
            }
    out.push_back({"nonmetricity-from-strain", q_from_s.value()});
    out.push_back({"strain-from-nonmetricity", s_from_q.value()});
    out.push_back({"cyclic", cyclic.value()});

    // the two expressions for K: from D g0 and from D0 g
    {
        const auto dg0 = covderiv_relative(from_matrix(e.g0, 0, 2), e.gamma);
        const auto dg = covderiv_relative(from_matrix(e.g, 0, 2), e.gamma0);
        auto at = [](const auto& t, int a, int b, int c) { return t.c[(a * kDim + b) * kDim + c].value(); };
        Residual r;
        for (int rho = 0; rho < kDim; ++rho)
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b) {
                    double k1 = 0.0, k2 = 0.0;
                    for (int s = 0; s < kDim; ++s) {
                        k1 += -0.5 * inv0[rho][s] * (at(dg0, a, b, s) + at(dg0, b, s, a) - at(dg0, s, a, b));
                        k2 += 0.5 * inv[rho][s] * (at(dg, a, b, s) + at(dg, b, a, s) - at(dg, s, a, b));
                    }
                    r.add(K[rho][a][b], k1);
                    r.add(K[rho][a][b], k2);
                }
        out.push_back({"contorsion-two-forms", r.value()});

        Residual compat;
        for (int k = 0; k < kDim; ++k)
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b) compat.add_term(std::abs(e.g[a][b].d(k)) + std::abs(e.g0[a][b].d(k)));
        const auto dgg = covderiv_relative(from_matrix(e.g, 0, 2), e.gamma);
        const auto dg0g0 = covderiv_relative(from_matrix(e.g0, 0, 2), e.gamma0);
        for (std::size_t i = 0; i < dgg.c.size(); ++i) {
            compat.add(dgg.c[i].value(), 0.0);
            compat.add(dg0g0.c[i].value(), 0.0);
        }
        out.push_back({"metric-compatibility", compat.value()});
    }

    Residual anti;
    for (int m = 0; m < kDim; ++m)
        for (int r = 0; r < kDim; ++r)
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b) anti.add(e.riemann[m][r][a][b], -e.riemann[m][r][b][a]);
    out.push_back({"riemann-antisymmetry", anti.value()});
    return out;
}

/// Every pair identity at one point.
inline std::vector<NamedResidual> pair_identities(const MetricField& metric, const MetricField& background, const Point& p) {
    const PairEvaluation e(metric, background, p);
    auto out = strain_identities(e);
    const CurvatureGap gap = curvature_gap(e);
    out.push_back({"curvature-gap", gap.residual_riemann});
    out.push_back({"gap-tensor-forms", gap.residual_gap_forms});
    out.push_back({"ricci-gap", gap.residual_ricci});
    for (auto& r : density_identities(e)) out.push_back(std::move(r));
    return out;
}

// ---------------------------------------------------------------------------
// Random metrics for identity sweeps

inline std::string format_coefficient(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// eta_{mu nu} + eps p_{mu nu}(x) with p of degree <= 2 and coefficients in
/// [-0.1, 0.1], as expression strings over the chart's coordinate names.
inline ExprGrid random_metric_grid(std::mt19937_64& rng, const std::array<std::string, kDim>& names, double eps = 1.0) {
    std::uniform_real_distribution<double> coef(-0.1, 0.1);
    ExprGrid grid;
    for (int i = 0; i < kDim; ++i)
        for (int j = i; j < kDim; ++j) {
            std::string s = i == j ? format_coefficient(kEtaDiag[i]) : "0";
            auto term = [&](const std::string& mono) {
                const double c = eps * coef(rng);
                s += "+(" + format_coefficient(c) + ")" + (mono.empty() ? "" : "*" + mono);
            };
            term("");
            for (int a = 0; a < kDim; ++a) term(names[a]);
            for (int a = 0; a < kDim; ++a)
                for (int b = a; b < kDim; ++b) term(names[a] + "*" + names[b]);
            grid[i][j] = s;
        }
    return grid;
}

inline std::shared_ptr<CoordinateChart> unit_box_chart(double half_width = 0.5) {
    return std::make_shared<CoordinateChart>(
        std::array<std::string, kDim>{"t", "x", "y", "z"},
        std::array<CoordinateChart::Interval, kDim>{{{-half_width, half_width},
                                                     {-half_width, half_width},
                                                     {-half_width, half_width},
                                                     {-half_width, half_width}}});
}

}  // namespace gaugeforge
