/**
 * @file jet.hpp
 * @brief Truncated multivariate Taylor jets over the four chart coordinates.
 *
 * A Jet<N> stores the Taylor coefficients of a scalar field about a point,
 * for every monomial x^a of total degree <= N in the four coordinates.
 * Coefficients are kept in graded order, so the coefficients of a Jet<M>
 * with M < N are a prefix of those of a Jet<N>; truncation is a copy.
 *
 * Differentiating a Jet<N> along one coordinate yields a Jet<N-1>. Binary
 * operations between jets of different order return the lower order.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace gaugeforge {

inline constexpr int kDim = 4;
inline constexpr int kMaxJetOrder = 3;

/// Raised when a jet or expression is evaluated outside the domain of an
/// elementary function (log of a non-positive value, division by ~0, ...).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

constexpr int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

constexpr int monomial_count(int order) { return binomial(order + kDim, kDim); }

struct Monomial {
    std::array<int, kDim> exp{};
    int degree = 0;
};

constexpr int factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

template <int N>
struct MonomialTable {
    static_assert(N >= 0 && N <= kMaxJetOrder, "jet order out of range");
    static constexpr int size = monomial_count(N);

    static constexpr std::array<Monomial, size> build_monomials() {
        std::array<Monomial, size> out{};
        int n = 0;
        out[n++] = Monomial{};
        for (int deg = 1; deg <= N; ++deg) {
            // nondecreasing index tuples i1 <= i2 <= ... <= ideg
            std::array<int, kMaxJetOrder> idx{};
            for (;;) {
                Monomial m;
                m.degree = deg;
                for (int p = 0; p < deg; ++p) ++m.exp[idx[p]];
                out[n++] = m;
                int p = deg - 1;
                while (p >= 0 && idx[p] == kDim - 1) --p;
                if (p < 0) break;
                ++idx[p];
                for (int q = p + 1; q < deg; ++q) idx[q] = idx[p];
            }
        }
        return out;
    }

    static constexpr std::array<Monomial, size> monomials = build_monomials();

    static constexpr int index_of(const std::array<int, kDim>& e) {
        for (int i = 0; i < size; ++i) {
            if (monomials[i].exp == e) return i;
        }
        return -1;
    }

    struct ProductTerm {
        std::uint8_t lhs, rhs, out;
    };

    static constexpr int count_products() {
        int c = 0;
        for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j)
                if (monomials[i].degree + monomials[j].degree <= N) ++c;
        return c;
    }

    static constexpr int product_size = count_products();

    static constexpr std::array<ProductTerm, product_size> build_products() {
        std::array<ProductTerm, product_size> out{};
        int c = 0;
        for (int i = 0; i < size; ++i) {
            for (int j = 0; j < size; ++j) {
                if (monomials[i].degree + monomials[j].degree > N) continue;
                std::array<int, kDim> e{};
                for (int a = 0; a < kDim; ++a) e[a] = monomials[i].exp[a] + monomials[j].exp[a];
                out[c++] = ProductTerm{static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j),
                                       static_cast<std::uint8_t>(index_of(e))};
            }
        }
        return out;
    }

    static constexpr std::array<ProductTerm, product_size> products = build_products();

    /// Multiplier turning a Taylor coefficient into the partial derivative.
    static constexpr std::array<double, size> build_factorials() {
        std::array<double, size> out{};
        for (int i = 0; i < size; ++i) {
            int f = 1;
            for (int a = 0; a < kDim; ++a) f *= factorial(monomials[i].exp[a]);
            out[i] = f;
        }
        return out;
    }

    static constexpr std::array<double, size> factorials = build_factorials();
};

}  // namespace detail

/// Derivative tensors of a scalar field at a point, through third order.
struct Jet3 {
    double value = 0.0;
    std::array<double, kDim> grad{};
    std::array<std::array<double, kDim>, kDim> hess{};
    std::array<std::array<std::array<double, kDim>, kDim>, kDim> third{};
};

template <int N>
class Jet {
public:
    static_assert(N >= 0 && N <= kMaxJetOrder, "jet order out of range");
    using Table = detail::MonomialTable<N>;
    static constexpr int order = N;
    static constexpr int size = Table::size;

    constexpr Jet() = default;
    constexpr Jet(double constant) { c_[0] = constant; }  // NOLINT(implicit)

    /// The coordinate function x^axis seeded at `value`.
    static Jet variable(int axis, double value) {
        Jet j(value);
        if constexpr (N >= 1) j.c_[1 + axis] = 1.0;
        return j;
    }

    double value() const { return c_[0]; }
    double coeff(int i) const { return c_[i]; }
    double& coeff(int i) { return c_[i]; }

    /// Partial derivative for the multi-index `e` (sum of entries <= N).
    double partial(const std::array<int, kDim>& e) const {
        const int i = Table::index_of(e);
        if (i < 0) throw std::out_of_range("partial order exceeds jet order");
        return c_[i] * Table::factorials[i];
    }

    double d(int a) const {
        std::array<int, kDim> e{};
        ++e[a];
        return partial(e);
    }
    double d(int a, int b) const {
        std::array<int, kDim> e{};
        ++e[a];
        ++e[b];
        return partial(e);
    }
    double d(int a, int b, int c) const {
        std::array<int, kDim> e{};
        ++e[a];
        ++e[b];
        ++e[c];
        return partial(e);
    }

    template <int M>
    Jet<M> truncate() const {
        static_assert(M <= N, "cannot raise jet order");
        Jet<M> out;
        for (int i = 0; i < Jet<M>::size; ++i) out.coeff(i) = c_[i];
        return out;
    }

    Jet3 derivatives() const {
        Jet3 out;
        out.value = c_[0];
        if constexpr (N >= 1) {
            for (int a = 0; a < kDim; ++a) out.grad[a] = d(a);
        }
        if constexpr (N >= 2) {
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b) out.hess[a][b] = d(a, b);
        }
        if constexpr (N >= 3) {
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b)
                    for (int c = 0; c < kDim; ++c) out.third[a][b][c] = d(a, b, c);
        }
        return out;
    }

    Jet& operator+=(const Jet& o) {
        for (int i = 0; i < size; ++i) c_[i] += o.c_[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int i = 0; i < size; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Jet& operator*=(double s) {
        for (auto& v : c_) v *= s;
        return *this;
    }
    Jet& operator+=(double s) {
        c_[0] += s;
        return *this;
    }
    Jet operator-() const {
        Jet r = *this;
        for (auto& v : r.c_) v = -v;
        return r;
    }

    friend Jet multiply(const Jet& a, const Jet& b) {
        Jet r;
        for (const auto& t : Table::products) r.c_[t.out] += a.c_[t.lhs] * b.c_[t.rhs];
        return r;
    }

    /// phi(f) given phi and its derivatives at f.value(): derivs[k] = phi^(k).
    Jet compose(const std::array<double, N + 1>& derivs) const {
        Jet r(derivs[0]);
        if constexpr (N >= 1) {
            Jet u = *this;
            u.c_[0] = 0.0;
            Jet power = u;
            double fact = 1.0;
            for (int k = 1; k <= N; ++k) {
                fact *= k;
                const double w = derivs[k] / fact;
                for (int i = 0; i < size; ++i) r.c_[i] += w * power.c_[i];
                if (k < N) power = multiply(power, u);
            }
        }
        return r;
    }

private:
    std::array<double, size> c_{};
};

template <class T>
struct is_jet : std::false_type {};
template <int N>
struct is_jet<Jet<N>> : std::true_type {};
template <class T>
inline constexpr bool is_jet_v = is_jet<T>::value;

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet<N>& j) {
    return j.value();
}

template <int N, int M>
auto operator+(const Jet<N>& a, const Jet<M>& b) {
    constexpr int K = std::min(N, M);
    Jet<K> r = a.template truncate<K>();
    r += b.template truncate<K>();
    return r;
}
template <int N, int M>
auto operator-(const Jet<N>& a, const Jet<M>& b) {
    constexpr int K = std::min(N, M);
    Jet<K> r = a.template truncate<K>();
    r -= b.template truncate<K>();
    return r;
}
template <int N, int M>
auto operator*(const Jet<N>& a, const Jet<M>& b) {
    constexpr int K = std::min(N, M);
    if constexpr (N == M) {
        return multiply(a, b);
    } else {
        return multiply(a.template truncate<K>(), b.template truncate<K>());
    }
}

template <int N>
Jet<N> operator+(Jet<N> a, double s) {
    a += s;
    return a;
}
template <int N>
Jet<N> operator+(double s, Jet<N> a) {
    a += s;
    return a;
}
template <int N>
Jet<N> operator-(Jet<N> a, double s) {
    a += -s;
    return a;
}
template <int N>
Jet<N> operator-(double s, const Jet<N>& a) {
    Jet<N> r = -a;
    r += s;
    return r;
}
template <int N>
Jet<N> operator*(Jet<N> a, double s) {
    a *= s;
    return a;
}
template <int N>
Jet<N> operator*(double s, Jet<N> a) {
    a *= s;
    return a;
}

inline constexpr double kDivisionFloor = 1e-300;

template <int N>
Jet<N> reciprocal(const Jet<N>& a) {
    const double v = a.value();
    if (!(std::abs(v) > kDivisionFloor)) throw DomainError("division by a value within 1e-300 of zero");
    std::array<double, N + 1> d{};
    double p = 1.0 / v;
    double sign = 1.0;
    double fact = 1.0;
    for (int k = 0; k <= N; ++k) {
        // (1/x)^(k) = (-1)^k k! / x^(k+1)
        d[k] = sign * fact * p;
        sign = -sign;
        fact *= (k + 1);
        p /= v;
    }
    return a.compose(d);
}

template <int N, int M>
auto operator/(const Jet<N>& a, const Jet<M>& b) {
    return a * reciprocal(b);
}
template <int N>
Jet<N> operator/(const Jet<N>& a, double s) {
    if (!(std::abs(s) > kDivisionFloor)) throw DomainError("division by a value within 1e-300 of zero");
    return a * (1.0 / s);
}
template <int N>
Jet<N> operator/(double s, const Jet<N>& a) {
    return reciprocal(a) * s;
}

/// Partial derivative along `axis`, lowering the order by one.
template <int N>
Jet<N - 1> diff(const Jet<N>& a, int axis) {
    static_assert(N >= 1, "cannot differentiate an order-0 jet");
    using Low = detail::MonomialTable<N - 1>;
    using High = detail::MonomialTable<N>;
    Jet<N - 1> r;
    for (int i = 0; i < Low::size; ++i) {
        auto e = Low::monomials[i].exp;
        const int mult = e[axis] + 1;
        ++e[axis];
        r.coeff(i) = mult * a.coeff(High::index_of(e));
    }
    return r;
}

template <int N>
Jet<N> sqrt(const Jet<N>& a) {
    const double v = a.value();
    if (v < 0.0 || (N > 0 && v == 0.0)) throw DomainError("sqrt of a non-positive value");
    std::array<double, N + 1> d{};
    const double s = std::sqrt(v);
    d[0] = s;
    if constexpr (N >= 1) d[1] = 0.5 / s;
    if constexpr (N >= 2) d[2] = -0.25 / (s * v);
    if constexpr (N >= 3) d[3] = 0.375 / (s * v * v);
    return a.compose(d);
}

template <int N>
Jet<N> exp(const Jet<N>& a) {
    std::array<double, N + 1> d{};
    d.fill(std::exp(a.value()));
    return a.compose(d);
}

template <int N>
Jet<N> log(const Jet<N>& a) {
    const double v = a.value();
    if (!(v > 0.0)) throw DomainError("log of a non-positive value");
    std::array<double, N + 1> d{};
    d[0] = std::log(v);
    double p = 1.0 / v;
    double sign = 1.0;
    double fact = 1.0;
    for (int k = 1; k <= N; ++k) {
        // log^(k) = (-1)^(k-1) (k-1)! / x^k
        d[k] = sign * fact * p;
        sign = -sign;
        fact *= k;
        p /= v;
    }
    return a.compose(d);
}

template <int N>
Jet<N> sin(const Jet<N>& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    const std::array<double, 4> cyc{s, c, -s, -c};
    std::array<double, N + 1> d{};
    for (int k = 0; k <= N; ++k) d[k] = cyc[k % 4];
    return a.compose(d);
}

template <int N>
Jet<N> cos(const Jet<N>& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    const std::array<double, 4> cyc{c, -s, -c, s};
    std::array<double, N + 1> d{};
    for (int k = 0; k <= N; ++k) d[k] = cyc[k % 4];
    return a.compose(d);
}

template <int N>
Jet<N> tan(const Jet<N>& a) {
    const double c = std::cos(a.value());
    if (!(std::abs(c) > kDivisionFloor)) throw DomainError("tan at a pole");
    const double t = std::tan(a.value());
    const double sec2 = 1.0 + t * t;
    std::array<double, N + 1> d{};
    d[0] = t;
    if constexpr (N >= 1) d[1] = sec2;
    if constexpr (N >= 2) d[2] = 2.0 * t * sec2;
    if constexpr (N >= 3) d[3] = 2.0 * sec2 * (sec2 + 2.0 * t * t);
    return a.compose(d);
}

template <int N>
Jet<N> cot(const Jet<N>& a) {
    const double s = std::sin(a.value());
    if (!(std::abs(s) > kDivisionFloor)) throw DomainError("cot at a pole");
    const double ct = std::cos(a.value()) / s;
    const double csc2 = 1.0 + ct * ct;
    std::array<double, N + 1> d{};
    d[0] = ct;
    if constexpr (N >= 1) d[1] = -csc2;
    if constexpr (N >= 2) d[2] = 2.0 * ct * csc2;
    if constexpr (N >= 3) d[3] = -2.0 * csc2 * (csc2 + 2.0 * ct * ct);
    return a.compose(d);
}

/// Integer power by repeated multiplication; negative exponents invert.
template <int N>
Jet<N> pow(const Jet<N>& a, int n) {
    if (n == 0) return Jet<N>(1.0);
    Jet<N> base = n < 0 ? reciprocal(a) : a;
    unsigned k = static_cast<unsigned>(n < 0 ? -static_cast<long>(n) : n);
    Jet<N> result(1.0);
    bool first = true;
    while (k) {
        if (k & 1u) {
            result = first ? base : multiply(result, base);
            first = false;
        }
        k >>= 1u;
        if (k) base = multiply(base, base);
    }
    return result;
}

/// Real power, defined for a positive base only.
template <int N>
Jet<N> pow(const Jet<N>& a, double p) {
    const double v = a.value();
    if (!(v > 0.0)) throw DomainError("non-integer power of a non-positive base");
    std::array<double, N + 1> d{};
    double coef = 1.0;
    for (int k = 0; k <= N; ++k) {
        d[k] = coef * std::pow(v, p - k);
        coef *= (p - k);
    }
    return a.compose(d);
}

/// Scalar counterparts so generic code can be written once over double and Jet.
inline double reciprocal(double a) {
    if (!(std::abs(a) > kDivisionFloor)) throw DomainError("division by a value within 1e-300 of zero");
    return 1.0 / a;
}

}  // namespace gaugeforge
