#include "oracles.hpp"

#include <gaugeforge/jet.hpp>

#include <gtest/gtest.h>

#include <random>

using gaugeforge::Jet;

namespace {

template <int N>
std::array<Jet<N>, 4> seed(const std::array<double, 4>& p) {
    std::array<Jet<N>, 4> v;
    for (int a = 0; a < 4; ++a) v[a] = Jet<N>::variable(a, p[a]);
    return v;
}

template <class T>
T sample_field(const std::array<T, 4>& x) {
    using std::cos;
    using std::exp;
    using std::sin;
    using std::sqrt;
    return sin(x[0] * x[1]) * exp(x[2]) / (2.0 + cos(x[3])) + sqrt(1.5 + x[1] * x[1] * x[3]);
}

}  // namespace

TEST(Jet, VariableSeedsGradient) {
    auto x = Jet<2>::variable(1, 3.0);
    EXPECT_EQ(x.value(), 3.0);
    EXPECT_EQ(x.d(1), 1.0);
    EXPECT_EQ(x.d(0), 0.0);
    EXPECT_EQ(x.d(1, 1), 0.0);
}

TEST(Jet, ProductRuleExact) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::array<double, 4> p{u(rng), u(rng), u(rng), u(rng)};
        auto x = seed<1>(p);
        Jet<1> f = sin(x[0]) * x[1] + x[2];
        Jet<1> g = exp(x[3]) - x[0] * x[2];
        Jet<1> fg = f * g;
        for (int a = 0; a < 4; ++a) {
            const double expect = f.d(a) * g.value() + f.value() * g.d(a);
            EXPECT_NEAR(fg.d(a), expect, 4 * std::numeric_limits<double>::epsilon() * (std::abs(expect) + 1.0));
        }
    }
}

TEST(Jet, ThirdPartialsTotallySymmetric) {
    auto x = seed<3>({0.3, -0.2, 0.7, 0.1});
    Jet<3> f = sample_field(x);
    const auto d = f.derivatives();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            EXPECT_EQ(d.hess[a][b], d.hess[b][a]);
            for (int c = 0; c < 4; ++c) {
                EXPECT_EQ(d.third[a][b][c], d.third[b][a][c]);
                EXPECT_EQ(d.third[a][b][c], d.third[a][c][b]);
                EXPECT_EQ(d.third[a][b][c], d.third[c][b][a]);
            }
        }
}

TEST(Jet, MatchesFiniteDifferences) {
    const std::array<double, 4> p{0.3, -0.2, 0.7, 0.1};
    auto f3 = sample_field(seed<3>(p));
    oracle::Scalar fv = [](const oracle::Point& q) { return sample_field<double>(q); };
    for (int a = 0; a < 4; ++a) {
        EXPECT_LT(oracle::rel_err(f3.d(a), oracle::central(fv, p, a, 1e-5)), 1e-7);
        for (int b = 0; b < 4; ++b) EXPECT_LT(oracle::rel_err(f3.d(a, b), oracle::central2(fv, p, a, b, 1e-4)), 1e-5);
    }
    // third partials against differences of exact hessians
    for (int c = 0; c < 4; ++c) {
        auto up = p, dn = p;
        up[c] += 1e-5;
        dn[c] -= 1e-5;
        const auto hu = sample_field(seed<2>(up));
        const auto hd = sample_field(seed<2>(dn));
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                EXPECT_LT(oracle::rel_err(f3.d(a, b, c), (hu.d(a, b) - hd.d(a, b)) / 2e-5), 1e-6);
    }
}

TEST(Jet, IntegerPowerAndNegativeBase) {
    auto x = Jet<3>::variable(0, -2.0);
    auto y = pow(x, 3);
    EXPECT_DOUBLE_EQ(y.value(), -8.0);
    EXPECT_DOUBLE_EQ(y.d(0), 12.0);
    EXPECT_DOUBLE_EQ(y.d(0, 0), -12.0);
    EXPECT_DOUBLE_EQ(y.d(0, 0, 0), 6.0);
    auto z = pow(x, -1);
    EXPECT_DOUBLE_EQ(z.value(), -0.5);
    EXPECT_DOUBLE_EQ(z.d(0), -0.25);
}

TEST(Jet, RealPowerRequiresPositiveBase) {
    EXPECT_THROW(pow(Jet<1>::variable(0, -1.0), 0.5), gaugeforge::DomainError);
    auto r = pow(Jet<2>::variable(0, 4.0), 0.5);
    EXPECT_DOUBLE_EQ(r.value(), 2.0);
    EXPECT_DOUBLE_EQ(r.d(0), 0.25);
}

TEST(Jet, DomainErrors) {
    EXPECT_THROW(log(Jet<1>::variable(0, 0.0)), gaugeforge::DomainError);
    EXPECT_THROW(reciprocal(Jet<1>(0.0)), gaugeforge::DomainError);
    EXPECT_THROW(sqrt(Jet<1>(-1.0)), gaugeforge::DomainError);
}

TEST(Jet, DiffLowersOrder) {
    auto x = seed<3>({1.0, 2.0, 0.5, 0.0});
    Jet<3> f = x[0] * x[0] * x[1];
    Jet<2> fx = diff(f, 0);
    EXPECT_DOUBLE_EQ(fx.value(), 4.0);
    EXPECT_DOUBLE_EQ(fx.d(0), 4.0);
    EXPECT_DOUBLE_EQ(fx.d(1), 2.0);
    EXPECT_DOUBLE_EQ(fx.d(0, 1), 2.0);
}

TEST(Jet, MixedOrderArithmeticTruncates) {
    auto a = Jet<3>::variable(0, 1.0);
    auto b = Jet<1>::variable(1, 2.0);
    auto c = a * b;
    static_assert(decltype(c)::order == 1);
    EXPECT_DOUBLE_EQ(c.value(), 2.0);
    EXPECT_DOUBLE_EQ(c.d(0), 2.0);
    EXPECT_DOUBLE_EQ(c.d(1), 1.0);
}
