/**
 * @file multiform.hpp
 * @brief Exterior and Clifford algebra of the 4D cotangent space at a point.
 *
 * A Multiform holds 16 coefficients on the basis blades
 *
 *     1, g0, g1, g2, g3, g01, g02, g03, g12, g13, g23, g012, g013, g023, g123, g0123
 *
 * (grade-major, lexicographic within a grade). Internally a blade is also
 * identified by its bit mask; all sign tables are derived from permutation
 * parity rather than written out.
 *
 * Coefficients may be plain doubles or jets, in which case every product
 * below propagates derivatives. Contractions and Hodge duals take a metric
 * (covariant components, inverse, and sqrt(-det)) whose entries may also be
 * jets.
 *
 * Conventions:
 *  - left contraction: for a 1-form a, a _| (b ^ C) = (a.b) C - b ^ (a _| C),
 *    extended by (A ^ B) _| C = A _| (B _| C);
 *  - Hodge dual: *A = reverse(A) _| tau_g, tau_g = sqrt(-det g) g0123;
 *    with this choice A ^ *B = <A, B>_g tau_g.
 */
#pragma once

#include <gaugeforge/jet.hpp>
#include <gaugeforge/linalg.hpp>

#include <Eigen/Dense>

#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

namespace gaugeforge {

inline constexpr int kBlades = 16;

namespace blade {

inline constexpr std::array<int, kBlades> kMaskOf{0, 1, 2, 4, 8, 3, 5, 9, 6, 10, 12, 7, 11, 13, 14, 15};

constexpr std::array<int, kBlades> build_index_of() {
    std::array<int, kBlades> r{};
    for (int i = 0; i < kBlades; ++i) r[kMaskOf[i]] = i;
    return r;
}

inline constexpr std::array<int, kBlades> kIndexOf = build_index_of();

constexpr int grade(int mask) { return std::popcount(static_cast<unsigned>(mask)); }

/// Sign of g^A ^ g^B relative to the sorted blade, 0 when they share a factor.
constexpr int wedge_sign(int a, int b) {
    if (a & b) return 0;
    int swaps = 0;
    for (int i = 0; i < kDim; ++i) {
        if (!(a & (1 << i))) continue;
        for (int j = 0; j < i; ++j)
            if (b & (1 << j)) ++swaps;
    }
    return (swaps % 2) ? -1 : 1;
}

constexpr std::array<std::array<int, kBlades>, kBlades> build_wedge_table() {
    std::array<std::array<int, kBlades>, kBlades> t{};
    for (int a = 0; a < kBlades; ++a)
        for (int b = 0; b < kBlades; ++b) t[a][b] = wedge_sign(a, b);
    return t;
}

/// Indexed by masks.
inline constexpr auto kWedgeSign = build_wedge_table();

constexpr int reverse_sign(int grade) { return ((grade * (grade - 1) / 2) % 2) ? -1 : 1; }

inline std::string name(int mask) {
    if (mask == 0) return "1";
    std::string s = "g";
    for (int i = 0; i < kDim; ++i)
        if (mask & (1 << i)) s += static_cast<char>('0' + i);
    return s;
}

}  // namespace blade

template <class A, class B>
using product_t = decltype(std::declval<A>() * std::declval<B>());

/// Converts between double and jets; a jet converts down by truncation.
template <class R, class X>
R convert(const X& x) {
    if constexpr (std::is_same_v<R, X>) {
        return x;
    } else if constexpr (std::is_same_v<X, double>) {
        return R(x);
    } else if constexpr (std::is_same_v<R, double>) {
        return x.value();
    } else {
        static_assert(is_jet_v<R> && is_jet_v<X>, "unsupported conversion");
        return x.template truncate<R::order>();
    }
}

template <class T>
class Multiform {
public:
    using scalar_type = T;

    Multiform() { c_.fill(T(0.0)); }

    static Multiform scalar(const T& s) {
        Multiform m;
        m.c_[0] = s;
        return m;
    }
    static Multiform basis(int mask, const T& coef = T(1.0)) {
        Multiform m;
        m.c_[blade::kIndexOf[mask]] = coef;
        return m;
    }
    /// The 1-form sum_mu v[mu] g^mu.
    static Multiform one_form(const Vec4<T>& v) {
        Multiform m;
        for (int mu = 0; mu < kDim; ++mu) m.c_[1 + mu] = v[mu];
        return m;
    }

    T& operator[](int index) { return c_[index]; }
    const T& operator[](int index) const { return c_[index]; }
    T& at_mask(int mask) { return c_[blade::kIndexOf[mask]]; }
    const T& at_mask(int mask) const { return c_[blade::kIndexOf[mask]]; }

    Multiform grade_part(int p) const {
        Multiform m;
        for (int i = 0; i < kBlades; ++i)
            if (blade::grade(blade::kMaskOf[i]) == p) m.c_[i] = c_[i];
        return m;
    }

    Vec4<T> vector_part() const { return {c_[1], c_[2], c_[3], c_[4]}; }

    Multiform& operator+=(const Multiform& o) {
        for (int i = 0; i < kBlades; ++i) c_[i] += o.c_[i];
        return *this;
    }
    Multiform& operator-=(const Multiform& o) {
        for (int i = 0; i < kBlades; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Multiform operator-() const {
        Multiform m;
        for (int i = 0; i < kBlades; ++i) m.c_[i] = -c_[i];
        return m;
    }

    template <class R>
    Multiform<R> as() const {
        Multiform<R> m;
        for (int i = 0; i < kBlades; ++i) m[i] = convert<R>(c_[i]);
        return m;
    }

    Multiform<double> values() const {
        Multiform<double> m;
        for (int i = 0; i < kBlades; ++i) m[i] = value_of(c_[i]);
        return m;
    }

    double max_abs() const {
        double r = 0.0;
        for (const auto& v : c_) r = std::max(r, std::abs(value_of(v)));
        return r;
    }

private:
    std::array<T, kBlades> c_;
};

template <class T, class U>
auto operator+(const Multiform<T>& a, const Multiform<U>& b) {
    using R = decltype(std::declval<T>() + std::declval<U>());
    Multiform<R> r;
    for (int i = 0; i < kBlades; ++i) r[i] = a[i] + b[i];
    return r;
}
template <class T, class U>
auto operator-(const Multiform<T>& a, const Multiform<U>& b) {
    using R = decltype(std::declval<T>() - std::declval<U>());
    Multiform<R> r;
    for (int i = 0; i < kBlades; ++i) r[i] = a[i] - b[i];
    return r;
}
template <class T>
Multiform<T> operator*(double s, const Multiform<T>& a) {
    Multiform<T> r;
    for (int i = 0; i < kBlades; ++i) r[i] = a[i] * s;
    return r;
}
/// Multiplication by a (possibly jet-valued) scalar field.
template <class S, class T>
auto scale(const S& s, const Multiform<T>& a) {
    using R = product_t<S, T>;
    Multiform<R> r;
    for (int i = 0; i < kBlades; ++i) r[i] = s * a[i];
    return r;
}

template <class T>
double max_abs_diff(const Multiform<T>& a, const Multiform<T>& b) {
    double r = 0.0;
    for (int i = 0; i < kBlades; ++i) r = std::max(r, std::abs(value_of(a[i]) - value_of(b[i])));
    return r;
}

/// Metric on 1-forms at a point: covariant components g_{mu nu}, the inverse
/// g^{mu nu} used by every contraction, and sqrt(-det g_{mu nu}).
template <class T>
struct MetricExtensor {
    Mat4<T> components;
    Mat4<T> inverse;
    T sqrt_neg_det;

    static MetricExtensor from_covariant(const Mat4<T>& cov) {
        using std::sqrt;
        MetricExtensor g{cov, gaugeforge::inverse(cov), T(0.0)};
        const T d = det(cov);
        if (!(value_of(d) < 0.0)) throw DomainError("metric determinant is not negative");
        g.sqrt_neg_det = sqrt(-d);
        return g;
    }
};

inline MetricExtensor<double> minkowski_metric() { return MetricExtensor<double>::from_covariant(minkowski()); }

/// Sorted eigenvalues of a symmetric 4x4 matrix.
inline std::array<double, kDim> symmetric_eigenvalues(const Mat4<double>& m) {
    Eigen::Matrix4d e;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) e(i, j) = m[i][j];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(e, Eigen::EigenvaluesOnly);
    std::array<double, kDim> r{};
    for (int i = 0; i < kDim; ++i) r[i] = solver.eigenvalues()(i);
    return r;
}

/// One positive and three negative eigenvalues.
inline bool has_lorentz_signature(const Mat4<double>& g) {
    const auto ev = symmetric_eigenvalues(g);
    return ev[0] < 0.0 && ev[1] < 0.0 && ev[2] < 0.0 && ev[3] > 0.0;
}

/// Throws std::invalid_argument when the stored invariants do not hold.
inline void validate(const MetricExtensor<double>& g, double tol = 1e-12) {
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            if (g.components[i][j] != g.components[j][i]) throw std::invalid_argument("metric components not symmetric");
    const auto prod = matmul(g.components, g.inverse);
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            if (std::abs(prod[i][j] - (i == j ? 1.0 : 0.0)) > tol) throw std::invalid_argument("inverse does not invert");
    if (!has_lorentz_signature(g.components)) throw std::invalid_argument("metric signature is not (+,-,-,-)");
    const double nd = -det(g.components);
    if (std::abs(g.sqrt_neg_det * g.sqrt_neg_det - nd) > tol * std::abs(nd))
        throw std::invalid_argument("sqrt_neg_det inconsistent with determinant");
}

template <class T, class U>
auto wedge(const Multiform<T>& a, const Multiform<U>& b) {
    using R = product_t<T, U>;
    Multiform<R> r;
    for (int i = 0; i < kBlades; ++i) {
        const int ma = blade::kMaskOf[i];
        for (int j = 0; j < kBlades; ++j) {
            const int mb = blade::kMaskOf[j];
            const int s = blade::kWedgeSign[ma][mb];
            if (s == 0) continue;
            R term = a[i] * b[j];
            if (s > 0) r.at_mask(ma | mb) += term;
            else r.at_mask(ma | mb) -= term;
        }
    }
    return r;
}

template <class T>
Multiform<T> reverse(const Multiform<T>& a) {
    Multiform<T> r = a;
    for (int i = 0; i < kBlades; ++i)
        if (blade::reverse_sign(blade::grade(blade::kMaskOf[i])) < 0) r[i] = -a[i];
    return r;
}

/// Grade involution: (-1)^p on grade p.
template <class T>
Multiform<T> involute(const Multiform<T>& a) {
    Multiform<T> r = a;
    for (int i = 0; i < kBlades; ++i)
        if (blade::grade(blade::kMaskOf[i]) % 2) r[i] = -a[i];
    return r;
}

namespace detail {

/// g^j _| B for a single basis covector g^j.
template <class T, class G>
auto contract_basis_vector(int j, const Multiform<T>& b, const Mat4<G>& inv) {
    using R = product_t<G, T>;
    Multiform<R> r;
    for (int i = 0; i < kBlades; ++i) {
        const int mb = blade::kMaskOf[i];
        int pos = 0;
        for (int k = 0; k < kDim; ++k) {
            if (!(mb & (1 << k))) continue;
            R term = inv[j][k] * b[i];
            if (pos % 2) r.at_mask(mb & ~(1 << k)) -= term;
            else r.at_mask(mb & ~(1 << k)) += term;
            ++pos;
        }
    }
    return r;
}

/// g^A _| B for a basis blade mask A, via (a ^ R) _| B = a _| (R _| B).
template <class T, class G>
auto contract_blade(int ma, const Multiform<T>& b, const Mat4<G>& inv) {
    using R = product_t<G, T>;
    if (ma == 0) return b.template as<R>();
    const int low = std::countr_zero(static_cast<unsigned>(ma));
    const int rest = ma & ~(1 << low);
    if (rest == 0) return contract_basis_vector(low, b, inv);
    return contract_basis_vector(low, contract_blade(rest, b, inv), inv).template as<R>();
}

}  // namespace detail

template <class T, class U, class G>
auto contract_left(const Multiform<T>& a, const Multiform<U>& b, const MetricExtensor<G>& g) {
    using R = product_t<product_t<T, U>, G>;
    Multiform<R> r;
    for (int i = 0; i < kBlades; ++i) {
        const int ma = blade::kMaskOf[i];
        r += scale(a[i], detail::contract_blade(ma, b, g.inverse)).template as<R>();
    }
    return r;
}

/// Contraction by a 1-form given by its components.
template <class T, class U, class G>
auto contract_vector(const Vec4<T>& a, const Multiform<U>& b, const MetricExtensor<G>& g) {
    using R = product_t<product_t<T, U>, G>;
    Multiform<R> r;
    for (int j = 0; j < kDim; ++j) r += scale(a[j], detail::contract_basis_vector(j, b, g.inverse)).template as<R>();
    return r;
}

template <class T, class U, class G>
auto scalar_product(const Multiform<T>& a, const Multiform<U>& b, const MetricExtensor<G>& g) {
    return contract_left(reverse(a), b, g)[0];
}

namespace detail {

template <class T, class G>
auto clifford_blade(int ma, const Multiform<T>& b, const MetricExtensor<G>& g) {
    using R = product_t<G, T>;
    if (ma == 0) return b.template as<R>();
    // g^A = a ^ g^Rest = a g^Rest - a _| g^Rest for the lowest factor a
    const int low = std::countr_zero(static_cast<unsigned>(ma));
    const int rest = ma & ~(1 << low);
    const Multiform<R> rest_b = clifford_blade(rest, b, g);
    const Multiform<double> a = Multiform<double>::basis(1 << low);
    Multiform<R> r = contract_basis_vector(low, rest_b, g.inverse).template as<R>();
    r += wedge(a, rest_b).template as<R>();
    if (rest != 0 && blade::grade(rest) >= 1) {
        const Multiform<double> rest_blade = Multiform<double>::basis(rest);
        const auto a_rest = contract_basis_vector(low, rest_blade, g.inverse);
        for (int i = 0; i < kBlades; ++i) {
            if (value_of(a_rest[i]) == 0.0 && !is_jet_v<G>) continue;
            r -= scale(a_rest[i], clifford_blade(blade::kMaskOf[i], b, g)).template as<R>();
        }
    }
    return r;
}

}  // namespace detail

template <class T, class U, class G>
auto clifford_product(const Multiform<T>& a, const Multiform<U>& b, const MetricExtensor<G>& g) {
    using R = product_t<product_t<T, U>, G>;
    Multiform<R> r;
    for (int i = 0; i < kBlades; ++i) r += scale(a[i], detail::clifford_blade(blade::kMaskOf[i], b, g)).template as<R>();
    return r;
}

template <class T, class G>
auto hodge_star(const Multiform<T>& a, const MetricExtensor<G>& g) {
    const auto tau = Multiform<G>::basis(15, g.sqrt_neg_det);
    return contract_left(reverse(a), tau, g);
}

/// Sign s_p with star(star(A_p)) = s_p A_p for a Lorentzian metric.
constexpr double double_dual_sign(int grade) { return ((grade * (4 - grade)) % 2) ? 1.0 : -1.0; }

/// Inverse of hodge_star, grade by grade.
template <class T, class G>
auto hodge_inverse(const Multiform<T>& a, const MetricExtensor<G>& g) {
    auto s = hodge_star(a, g);
    for (int i = 0; i < kBlades; ++i) {
        // a of grade q came from star of a (4-q)-form; s_q = s_{4-q}
        const int q = blade::grade(blade::kMaskOf[i]);
        if (double_dual_sign(4 - q) < 0) s[i] = -s[i];
    }
    return s;
}

/// Extend a linear map of 1-forms as a derivation; m[rho][i] is the
/// g^rho component of the image of g^i.
template <class T, class M>
auto derivation_extend(const Mat4<M>& m, const Multiform<T>& a) {
    using R = product_t<M, T>;
    Multiform<R> r;
    for (int idx = 0; idx < kBlades; ++idx) {
        const int mask = blade::kMaskOf[idx];
        if (mask == 0) continue;
        for (int i = 0; i < kDim; ++i) {
            if (!(mask & (1 << i))) continue;
            const int rest = mask & ~(1 << i);
            for (int rho = 0; rho < kDim; ++rho) {
                if (rest & (1 << rho)) continue;
                // factor rho sits where i was: count factors it must pass to sort
                int passes = 0;
                for (int k = 0; k < kDim; ++k) {
                    if (!(rest & (1 << k))) continue;
                    if ((k < i && k > rho) || (k > i && k < rho)) ++passes;
                }
                R term = m[rho][i] * a[idx];
                if (passes % 2) r.at_mask(rest | (1 << rho)) -= term;
                else r.at_mask(rest | (1 << rho)) += term;
            }
        }
    }
    return r;
}

/// Linear map of 1-forms, h(g^beta) = sum_alpha matrix[alpha][beta] g^alpha.
struct Extensor {
    Mat4<double> matrix = identity4();

    /// Adjoint with respect to the Minkowski scalar product: eta M^T eta.
    Extensor adjoint() const {
        Extensor r;
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b) r.matrix[a][b] = kEtaDiag[a] * matrix[b][a] * kEtaDiag[b];
        return r;
    }
    Extensor inverse() const { return Extensor{gaugeforge::inverse(matrix)}; }
    double determinant() const { return det(matrix); }
    Vec4<double> apply(const Vec4<double>& v) const {
        Vec4<double> r{};
        for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b) r[a] += matrix[a][b] * v[b];
        return r;
    }
    friend Extensor operator*(const Extensor& a, const Extensor& b) { return Extensor{matmul(a.matrix, b.matrix)}; }
};

namespace detail {

template <class T>
T minor_det(const Mat4<T>& m, int rows, int cols) {
    const int k = blade::grade(rows);
    if (k == 0) return T(1.0);
    const int r0 = std::countr_zero(static_cast<unsigned>(rows));
    T sum(0.0);
    int pos = 0;
    for (int c = 0; c < kDim; ++c) {
        if (!(cols & (1 << c))) continue;
        T term = m[r0][c] * minor_det(m, rows & ~(1 << r0), cols & ~(1 << c));
        if (pos % 2) sum -= term;
        else sum += term;
        ++pos;
    }
    return sum;
}

}  // namespace detail

/// Grade-preserving action h(a1 ^ ... ^ ap) = h(a1) ^ ... ^ h(ap).
template <class T, class M>
auto outermorphism(const Mat4<M>& h, const Multiform<T>& a) {
    using R = product_t<M, T>;
    Multiform<R> r;
    for (int i = 0; i < kBlades; ++i) {
        const int mc = blade::kMaskOf[i];
        for (int j = 0; j < kBlades; ++j) {
            const int mr = blade::kMaskOf[j];
            if (blade::grade(mr) != blade::grade(mc)) continue;
            r[j] += detail::minor_det(h, mr, mc) * a[i];
        }
    }
    return r;
}

template <class T>
Multiform<T> outermorphism(const Extensor& h, const Multiform<T>& a) {
    return outermorphism(h.matrix, a);
}

}  // namespace gaugeforge
