/**
 * @file linalg.hpp
 * @brief Fixed 4x4 arrays and tensors over double or jet scalars.
 */
#pragma once

#include <gaugeforge/jet.hpp>

#include <array>
#include <cmath>
#include <stdexcept>

namespace gaugeforge {

template <class T>
using Vec4 = std::array<T, kDim>;
template <class T>
using Mat4 = std::array<std::array<T, kDim>, kDim>;
template <class T>
using Tensor3 = std::array<Mat4<T>, kDim>;
template <class T>
using Tensor4 = std::array<Tensor3<T>, kDim>;

/// Minkowski diagonal in (+,-,-,-) signature.
inline constexpr std::array<double, kDim> kEtaDiag{1.0, -1.0, -1.0, -1.0};

inline Mat4<double> minkowski() {
    Mat4<double> m{};
    for (int a = 0; a < kDim; ++a) m[a][a] = kEtaDiag[a];
    return m;
}

inline Mat4<double> identity4() {
    Mat4<double> m{};
    for (int a = 0; a < kDim; ++a) m[a][a] = 1.0;
    return m;
}

template <class T>
Mat4<T> zero_mat() {
    Mat4<T> m;
    for (auto& row : m) row.fill(T(0.0));
    return m;
}

template <class T>
Tensor3<T> zero_tensor3() {
    Tensor3<T> t;
    for (auto& m : t) m = zero_mat<T>();
    return t;
}

template <class T>
Tensor4<T> zero_tensor4() {
    Tensor4<T> t;
    for (auto& m : t) m = zero_tensor3<T>();
    return t;
}

template <class T>
Mat4<T> transpose(const Mat4<T>& m) {
    Mat4<T> r = m;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) r[i][j] = m[j][i];
    return r;
}

template <class A, class B>
auto matmul(const Mat4<A>& a, const Mat4<B>& b) {
    using R = decltype(a[0][0] * b[0][0]);
    Mat4<R> r = zero_mat<R>();
    for (int i = 0; i < kDim; ++i)
        for (int k = 0; k < kDim; ++k)
            for (int j = 0; j < kDim; ++j) r[i][j] += a[i][k] * b[k][j];
    return r;
}

namespace detail {

template <class T>
T det3(const Mat4<T>& m, int r0, int r1, int r2, int c0, int c1, int c2) {
    return m[r0][c0] * (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) -
           m[r0][c1] * (m[r1][c0] * m[r2][c2] - m[r1][c2] * m[r2][c0]) +
           m[r0][c2] * (m[r1][c0] * m[r2][c1] - m[r1][c1] * m[r2][c0]);
}

inline std::array<int, 3> others(int k) {
    std::array<int, 3> o{};
    int n = 0;
    for (int i = 0; i < kDim; ++i)
        if (i != k) o[n++] = i;
    return o;
}

}  // namespace detail

/// Cofactor matrix C with C[i][j] = (-1)^(i+j) * minor(i, j).
template <class T>
Mat4<T> cofactors(const Mat4<T>& m) {
    Mat4<T> c = m;
    for (int i = 0; i < kDim; ++i) {
        const auto r = detail::others(i);
        for (int j = 0; j < kDim; ++j) {
            const auto k = detail::others(j);
            T minor = detail::det3(m, r[0], r[1], r[2], k[0], k[1], k[2]);
            c[i][j] = ((i + j) % 2 == 0) ? minor : -minor;
        }
    }
    return c;
}

template <class T>
T det(const Mat4<T>& m) {
    const Mat4<T> c = cofactors(m);
    T d = m[0][0] * c[0][0];
    for (int j = 1; j < kDim; ++j) d += m[0][j] * c[0][j];
    return d;
}

template <class T>
Mat4<T> inverse(const Mat4<T>& m, double singular_tol = 1e-300) {
    const Mat4<T> c = cofactors(m);
    T d = m[0][0] * c[0][0];
    for (int j = 1; j < kDim; ++j) d += m[0][j] * c[0][j];
    if (!(std::abs(value_of(d)) > singular_tol)) throw DomainError("singular 4x4 matrix");
    const T inv_d = reciprocal(d);
    Mat4<T> r = m;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) r[i][j] = c[j][i] * inv_d;
    return r;
}

template <class T>
Mat4<double> values(const Mat4<T>& m) {
    Mat4<double> r{};
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) r[i][j] = value_of(m[i][j]);
    return r;
}

template <int M, int N>
Mat4<Jet<M>> truncate(const Mat4<Jet<N>>& m) {
    Mat4<Jet<M>> r;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) r[i][j] = m[i][j].template truncate<M>();
    return r;
}

template <int M, int N>
Tensor3<Jet<M>> truncate(const Tensor3<Jet<N>>& t) {
    Tensor3<Jet<M>> r;
    for (int k = 0; k < kDim; ++k) r[k] = truncate<M>(t[k]);
    return r;
}

template <int N>
Mat4<Jet<N - 1>> diff(const Mat4<Jet<N>>& m, int axis) {
    Mat4<Jet<N - 1>> r;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) r[i][j] = diff(m[i][j], axis);
    return r;
}

template <class T>
double max_abs(const Mat4<T>& m) {
    double r = 0.0;
    for (const auto& row : m)
        for (const auto& v : row) r = std::max(r, std::abs(value_of(v)));
    return r;
}

}  // namespace gaugeforge
