#include "form_convert.hpp"

#include <gaugeforge/multiform.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace gaugeforge;
using MF = Multiform<double>;

namespace {

MF g(int mask) { return MF::basis(mask); }

MF random_mf(std::mt19937_64& rng, int grade = -1) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    MF m;
    for (int i = 0; i < kBlades; ++i)
        if (grade < 0 || blade::grade(blade::kMaskOf[i]) == grade) m[i] = u(rng);
    return m;
}

// Lorentzian by Sylvester's law: L^T eta L with L near the identity.
MetricExtensor<double> random_metric(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    Mat4<double> l = identity4();
    for (auto& row : l)
        for (auto& v : row) v += u(rng);
    const auto eta = minkowski();
    auto m = matmul(transpose(l), matmul(eta, l));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < i; ++j) m[i][j] = m[j][i];
    return MetricExtensor<double>::from_covariant(m);
}

}  // namespace

TEST(Multiform, BladeTables) {
    EXPECT_EQ(blade::kMaskOf[5], 0b0011);
    EXPECT_EQ(blade::kMaskOf[10], 0b1100);
    EXPECT_EQ(blade::kMaskOf[15], 0b1111);
    for (int i = 0; i < kBlades; ++i) EXPECT_EQ(blade::kIndexOf[blade::kMaskOf[i]], i);
    EXPECT_EQ(blade::name(0b0110), "g12");
}

TEST(Multiform, WedgeExamples) {
    EXPECT_EQ(wedge(g(1), g(1)).max_abs(), 0.0);
    const MF r = wedge(g(1) + g(2), g(1) - g(2));
    EXPECT_EQ(r.at_mask(3), -2.0);
    EXPECT_EQ(wedge(g(3), g(12)).at_mask(15), 1.0);
}

TEST(Multiform, WedgeGradedAnticommutative) {
    std::mt19937_64 rng(3);
    for (int p = 0; p <= 4; ++p)
        for (int q = 0; q <= 4; ++q) {
            MF a = random_mf(rng, p), b = random_mf(rng, q);
            const double s = ((p * q) % 2) ? -1.0 : 1.0;
            EXPECT_LT(max_abs_diff(wedge(a, b), s * wedge(b, a)), 1e-14);
        }
    MF a = random_mf(rng), b = random_mf(rng), c = random_mf(rng);
    EXPECT_LT(max_abs_diff(wedge(wedge(a, b), c), wedge(a, wedge(b, c))), 1e-13);
}

TEST(Multiform, GradePartsReconstruct) {
    std::mt19937_64 rng(4);
    MF a = random_mf(rng);
    MF sum;
    for (int p = 0; p <= 4; ++p) sum += a.grade_part(p);
    EXPECT_EQ(max_abs_diff(sum, a), 0.0);
}

TEST(Multiform, ContractionExamples) {
    const auto eta = minkowski_metric();
    EXPECT_EQ(max_abs_diff(contract_left(g(1), g(3), eta), g(2)), 0.0);
    EXPECT_EQ(max_abs_diff(contract_left(g(2), g(3), eta), g(1)), 0.0);
    std::mt19937_64 rng(5);
    MF b = random_mf(rng);
    EXPECT_EQ(max_abs_diff(contract_left(MF::scalar(1.0), b, eta), b), 0.0);
    // grade lowers, and vanishes when negative
    EXPECT_EQ(contract_left(g(3), g(1), eta).max_abs(), 0.0);
}

TEST(Multiform, ContractionMatchesIndexFormula) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_metric(rng);
        MF a = random_mf(rng, 1);
        for (int p = 1; p <= 4; ++p) {
            MF b = random_mf(rng, p);
            const auto expect = oracle::contract({a[1], a[2], a[3], a[4]}, oracle::to_index_form(b, p), m.inverse);
            EXPECT_LT(max_abs_diff(contract_left(a, b, m), oracle::from_index_form(expect)), 1e-13);
        }
    }
}

TEST(Multiform, CliffordExamples) {
    const auto eta = minkowski_metric();
    EXPECT_EQ(max_abs_diff(clifford_product(g(1), g(1), eta), MF::scalar(1.0)), 0.0);
    EXPECT_EQ(max_abs_diff(clifford_product(g(1), g(2), eta), g(3)), 0.0);
    EXPECT_EQ(max_abs_diff(clifford_product(clifford_product(g(1), g(2), eta), g(2), eta), -g(1)), 0.0);
}

TEST(Multiform, CliffordProperties) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_metric(rng);
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = 0; nu < 4; ++nu) {
                const MF s = clifford_product(g(1 << mu), g(1 << nu), m) + clifford_product(g(1 << nu), g(1 << mu), m);
                EXPECT_LT(max_abs_diff(s, MF::scalar(2.0 * m.inverse[mu][nu])), 1e-13);
            }
        MF a = random_mf(rng, 1), b = random_mf(rng), c = random_mf(rng), d = random_mf(rng);
        EXPECT_LT(max_abs_diff(clifford_product(a, b, m), contract_left(a, b, m) + wedge(a, b)), 1e-12);
        EXPECT_LT(max_abs_diff(clifford_product(clifford_product(b, c, m), d, m),
                               clifford_product(b, clifford_product(c, d, m), m)),
                  1e-11);
    }
}

TEST(Multiform, HodgeExamples) {
    const auto eta = minkowski_metric();
    EXPECT_EQ(max_abs_diff(hodge_star(MF::scalar(1.0), eta), g(15)), 0.0);
    EXPECT_EQ(max_abs_diff(hodge_star(g(1), eta), g(14)), 0.0);

    // Schwarzschild at m = 1, r = 10, theta = pi/2
    Mat4<double> s{};
    s[0][0] = 0.8;
    s[1][1] = -1.0 / 0.8;
    s[2][2] = -100.0;
    s[3][3] = -100.0;
    const auto sch = MetricExtensor<double>::from_covariant(s);
    EXPECT_NEAR(hodge_star(g(1), sch).at_mask(14), 125.0, 1e-12);
}

TEST(Multiform, HodgeMatchesIndexFormula) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_metric(rng);
        for (int p = 0; p <= 4; ++p) {
            MF a = random_mf(rng, p);
            const auto expect = oracle::hodge(oracle::to_index_form(a, p), m.inverse, m.sqrt_neg_det);
            EXPECT_LT(max_abs_diff(hodge_star(a, m), oracle::from_index_form(expect)), 1e-12) << "grade " << p;
        }
    }
}

TEST(Multiform, DoubleDualAndInverse) {
    std::mt19937_64 rng(9);
    std::vector<MetricExtensor<double>> metrics{minkowski_metric()};
    for (int i = 0; i < 50; ++i) metrics.push_back(random_metric(rng));
    for (const auto& m : metrics) {
        for (int p = 0; p <= 4; ++p) {
            MF a = random_mf(rng, p);
            EXPECT_LT(max_abs_diff(hodge_star(hodge_star(a, m), m), double_dual_sign(p) * a), 1e-12);
            EXPECT_LT(max_abs_diff(hodge_inverse(hodge_star(a, m), m), a), 1e-12);
            EXPECT_LT(max_abs_diff(hodge_star(hodge_inverse(a, m), m), a), 1e-12);
        }
    }
}

TEST(Multiform, DualityPairing) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_metric(rng);
        for (int p = 0; p <= 4; ++p) {
            MF a = random_mf(rng, p), b = random_mf(rng, p);
            const MF lhs = wedge(a, hodge_star(b, m));
            const MF rhs = MF::basis(15, scalar_product(a, b, m) * m.sqrt_neg_det);
            EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12);
        }
    }
}

TEST(Multiform, ContractionWedgeAdjunction) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_metric(rng);
        MF a = random_mf(rng), b = random_mf(rng), c = random_mf(rng);
        EXPECT_NEAR(scalar_product(contract_left(a, b, m), c, m), scalar_product(b, wedge(reverse(a), c), m), 1e-12);
    }
}

TEST(Multiform, OutermorphismExamples) {
    std::mt19937_64 rng(12);
    MF a = random_mf(rng);
    EXPECT_EQ(max_abs_diff(outermorphism(Extensor{}, a), a), 0.0);
    Extensor d{};
    d.matrix[0][0] = 2.0;
    EXPECT_EQ(max_abs_diff(outermorphism(d, g(15)), 2.0 * g(15)), 0.0);
    Extensor e{};
    e.matrix[0][0] = 1.1;
    e.matrix[1][1] = 0.9;
    EXPECT_NEAR(outermorphism(e, g(3)).at_mask(3), 0.99, 1e-15);
}

TEST(Multiform, OutermorphismComposesAndWedges) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Extensor h1, h2;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                h1.matrix[i][j] = u(rng);
                h2.matrix[i][j] = u(rng);
            }
        MF a = random_mf(rng), b = random_mf(rng);
        EXPECT_LT(max_abs_diff(outermorphism(h1 * h2, a), outermorphism(h1, outermorphism(h2, a))), 1e-12);
        EXPECT_LT(max_abs_diff(outermorphism(h1, wedge(a, b)), wedge(outermorphism(h1, a), outermorphism(h1, b))), 1e-12);
        EXPECT_NEAR(outermorphism(h1, g(15)).at_mask(15), h1.determinant(), 1e-13);
    }
}

TEST(Multiform, ExtensorAdjoint) {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Extensor h;
    for (auto& row : h.matrix)
        for (auto& v : row) v = u(rng);
    const auto eta = minkowski_metric();
    const auto ha = h.adjoint();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const double lhs = scalar_product(outermorphism(h, g(1 << a)), g(1 << b), eta);
            const double rhs = scalar_product(g(1 << a), outermorphism(ha, g(1 << b)), eta);
            EXPECT_NEAR(lhs, rhs, 1e-14);
        }
}

TEST(Multiform, DerivationExtension) {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat4<double> m{};
    for (auto& row : m)
        for (auto& v : row) v = u(rng);
    // derivation rule on a wedge product, and the linear action on 1-forms
    MF a = random_mf(rng), b = random_mf(rng);
    const MF lhs = derivation_extend(m, wedge(a, b));
    const MF rhs = wedge(derivation_extend(m, a), b) + wedge(a, derivation_extend(m, b));
    EXPECT_LT(max_abs_diff(lhs, rhs), 1e-13);
    const MF v = derivation_extend(m, g(1 << 2));
    for (int rho = 0; rho < 4; ++rho) EXPECT_EQ(v.at_mask(1 << rho), m[rho][2]);
}

TEST(Multiform, MetricValidation) {
    EXPECT_NO_THROW(validate(minkowski_metric()));
    Mat4<double> e = identity4();
    EXPECT_THROW(MetricExtensor<double>::from_covariant(e), DomainError);
    Mat4<double> wrong = minkowski();
    wrong[0][0] = -1.0;
    wrong[1][1] = 1.0;
    wrong[2][2] = 1.0;
    wrong[3][3] = 1.0;
    // det < 0 but signature (-,+,+,+)
    auto bad = MetricExtensor<double>::from_covariant(wrong);
    EXPECT_THROW(validate(bad), std::invalid_argument);
}

TEST(Multiform, JetCoefficientsPropagate) {
    auto x = Jet<1>::variable(0, 0.5);
    Multiform<Jet<1>> a = Multiform<Jet<1>>::basis(1, x);
    Multiform<Jet<1>> b = Multiform<Jet<1>>::basis(2, x * x);
    const auto w = wedge(a, b);
    EXPECT_DOUBLE_EQ(w.at_mask(3).value(), 0.125);
    EXPECT_DOUBLE_EQ(w.at_mask(3).d(0), 0.75);
}
