#include "fixtures.hpp"
#include "oracles.hpp"

#include <gaugeforge/gauge.hpp>
#include <gaugeforge/sampling.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace gaugeforge;

namespace {

const double kPi = std::acos(-1.0);

// d_mu(sqrt|g| g^{mu nu}) + Gamma0^nu_{mu l} sqrt|g| g^{mu l} with every
// derivative a central difference.
Vec4<double> fd_logunov(const MetricField& g, const MetricField& g0, const Point& p, double h = 1e-5) {
    auto density = [&](const Point& q) {
        const auto m = g.value(q);
        const auto inv = inverse(m);
        const double s = std::sqrt(-det(m));
        Mat4<double> d{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) d[i][j] = s * inv[i][j];
        return d;
    };
    // background Christoffels by differences
    std::array<Mat4<double>, 4> dg{};
    for (int s = 0; s < 4; ++s)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                dg[s][i][j] = oracle::central([&](const Point& q) { return g0.value(q)[i][j]; }, p, s, h);
    const auto inv0 = inverse(g0.value(p));
    const auto dens = density(p);
    Vec4<double> r{};
    for (int nu = 0; nu < 4; ++nu) {
        for (int mu = 0; mu < 4; ++mu)
            r[nu] += oracle::central([&](const Point& q) { return density(q)[mu][nu]; }, p, mu, h);
        for (int mu = 0; mu < 4; ++mu)
            for (int l = 0; l < 4; ++l) {
                double gam = 0.0;
                for (int s = 0; s < 4; ++s) gam += 0.5 * inv0[nu][s] * (dg[mu][l][s] + dg[l][mu][s] - dg[s][mu][l]);
                r[nu] += gam * dens[mu][l];
            }
    }
    return r;
}

std::vector<Point> spherical_points(int n, std::uint64_t seed) {
    return sample_points(*fixture::spherical_chart(), n, seed).points;
}

}  // namespace

TEST(Logunov, FlatBackgroundAgainstItself) {
    const auto c = fixture::spherical_chart();
    const auto flat = fixture::flat_spherical(c);
    for (const auto& p : spherical_points(20, 1)) {
        const auto r = logunov_residual(flat, flat, p);
        for (double v : r) EXPECT_LT(std::abs(v), 1e-10);
    }
}

TEST(Logunov, SchwarzschildClosedForm) {
    const auto c = fixture::spherical_chart();
    const auto s = fixture::schwarzschild(c, 1.0);
    const auto flat = fixture::flat_spherical(c);
    const auto r = logunov_residual(s, flat, Point{0.0, 10.0, kPi / 2, 0.3});
    EXPECT_NEAR(r[1], 2.0, 1e-12);
    for (const auto& p : spherical_points(20, 2)) {
        const auto v = logunov_residual(s, flat, p);
        const double want = 2.0 * std::sin(p[2]);
        EXPECT_LT(std::abs(v[1] - want) / want, 1e-8);
        EXPECT_LT(std::abs(v[0]), 1e-10);
        EXPECT_LT(std::abs(v[2]), 1e-10);
        EXPECT_LT(std::abs(v[3]), 1e-10);
        const auto fd = fd_logunov(s, flat, p);
        for (int nu = 0; nu < 4; ++nu) EXPECT_NEAR(v[nu], fd[nu], 1e-6);
    }
}

TEST(Logunov, LogunovMetricSatisfiesTheCondition) {
    const auto c = fixture::spherical_chart();
    const auto flat = fixture::flat_spherical(c);
    const auto l = fixture::logunov(c, 0.0, 1.0);
    for (const auto& p : spherical_points(20, 3))
        for (double v : logunov_residual(l, flat, p)) EXPECT_LT(std::abs(v), 1e-9);
}

TEST(Harmonic, CartesianMinkowskiIsHarmonic) {
    const auto m = fixture::minkowski_cartesian(unit_box_chart());
    for (double v : harmonic_residual(m, Point{0.1, 0.2, 0.3, -0.1})) EXPECT_EQ(v, 0.0);
}

TEST(Harmonic, FlatSphericalRadius) {
    const auto flat = fixture::flat_spherical(fixture::spherical_chart(1.0));
    const auto r = harmonic_residual(flat, Point{0.0, 2.0, 1.0, 0.5});
    EXPECT_NEAR(r[1], -1.0, 1e-14);
}

TEST(Harmonic, LogunovMetricIsNotHarmonic) {
    const auto c = fixture::spherical_chart();
    const auto l = fixture::logunov(c, 0.0, 1.0);
    const auto r = harmonic_residual(l, Point{0.0, 10.0, kPi / 2, 0.0});
    EXPECT_NEAR(r[1], -20.0 / 121.0, 1e-14);
    for (const auto& p : spherical_points(20, 4)) {
        const double want = -2.0 * p[1] / ((p[1] + 1.0) * (p[1] + 1.0));
        EXPECT_LT(std::abs(harmonic_residual(l, p)[1] - want) / std::abs(want), 1e-8);
    }
}

TEST(Harmonic, SplitRecombines) {
    std::mt19937_64 rng(8);
    const auto chart = unit_box_chart();
    for (int n = 0; n < 10; ++n) {
        const auto g = MetricField::parse(chart, random_metric_grid(rng, {"t", "x", "y", "z"}));
        const auto g0 = MetricField::parse(chart, random_metric_grid(rng, {"t", "x", "y", "z"}));
        EXPECT_LT(harmonic_split(g, g0, Point{0.1, -0.2, 0.05, 0.3}).recombination, 1e-12);
    }
}

TEST(Harmonic, CoordinateCoframeDivergenceIsMinusBox) {
    const auto l = fixture::logunov(fixture::spherical_chart(), 1.0, 1.0);
    const Point p{0.0, 7.0, 1.2, 0.1};
    const auto box = harmonic_residual(l, p);
    const auto div = coordinate_coframe_divergence(l, p);
    for (int mu = 0; mu < 4; ++mu) EXPECT_NEAR(div[mu], -box[mu], 1e-13);
}

TEST(Implications, BridgeOnSchwarzschild) {
    const auto c = fixture::spherical_chart();
    const auto imp = gauge_implications(fixture::schwarzschild(c), fixture::flat_spherical(c), spherical_points(20, 5));
    EXPECT_LT(imp.bridge, 1e-8);
}

TEST(Implications, BridgeOnRandomPairsAgreesWithTraceIdentity) {
    std::mt19937_64 rng(9);
    const auto chart = unit_box_chart();
    for (int n = 0; n < 50; ++n) {
        const auto g = MetricField::parse(chart, random_metric_grid(rng, {"t", "x", "y", "z"}));
        const auto g0 = MetricField::parse(chart, random_metric_grid(rng, {"t", "x", "y", "z"}));
        const auto pts = sample_points(*chart, 20, 100 + n).points;
        EXPECT_LT(gauge_implications(g, g0, pts).bridge, 1e-8);
        // the same relation as written by the trace identities
        const PairEvaluation e(g, g0, pts[0]);
        const auto div = logunov_residual(g, g0, pts[0]);
        const double sg = std::sqrt(-e.det_g.value());
        for (int r = 0; r < 4; ++r) {
            double gk = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) gk += e.inv[a][b].value() * e.K[r][a][b].value();
            EXPECT_NEAR(div[r], -sg * gk, 1e-12);
        }
    }
}

TEST(Implications, LogunovDoesNotImplyHarmonic) {
    const auto c = fixture::spherical_chart();
    const auto imp = gauge_implications(fixture::logunov(c, 0.0), fixture::flat_spherical(c), spherical_points(20, 6));
    EXPECT_EQ(imp.logunov_active, 20);
    ASSERT_TRUE(imp.logunov_implies.has_value());
    EXPECT_LT(*imp.logunov_implies, 1e-8);
    EXPECT_EQ(imp.harmonic_active, 0);
}

TEST(Implications, CartesianIdentityPair) {
    const auto chart = unit_box_chart();
    const auto m = fixture::minkowski_cartesian(chart);
    const auto imp = gauge_implications(m, m, sample_points(*chart, 5, 1).points);
    EXPECT_EQ(imp.bridge, 0.0);
    ASSERT_TRUE(imp.harmonic_implies && imp.logunov_implies);
    EXPECT_EQ(*imp.harmonic_implies, 0.0);
    EXPECT_EQ(*imp.logunov_implies, 0.0);
}

TEST(PostulateGap, IdentityAndWitness) {
    EXPECT_EQ(postulate_gap(identity4(), 1.0), 0.0);
    Mat4<double> h = identity4();
    h[0][0] = 1.1;
    EXPECT_GT(postulate_gap(h, 1.0), 1e-3);
    // kappa g^00 = 1.1 / 1.21 against 1 + 0.1
    EXPECT_NEAR(postulate_gap(h, 1.0), 1.1 - 1.1 / 1.21, 1e-14);
    EXPECT_NEAR(postulate_gap(h, 2.0), 2.0 * postulate_gap(h, 1.0), 1e-15);
}

TEST(PostulateGap, VanishesLinearlyNearIdentity) {
    Mat4<double> e{};
    e[0][1] = 1.0;
    e[1][0] = -1.0;
    e[2][2] = 0.5;
    std::vector<double> gaps;
    for (double eps : {1e-2, 1e-4, 1e-6}) {
        Mat4<double> h = identity4();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) h[i][j] += eps * e[i][j];
        gaps.push_back(postulate_gap(h, 1.0));
    }
    EXPECT_GT(gaps[0], 0.0);
    EXPECT_NEAR(gaps[1] / gaps[0], 1e-2, 1e-3);
    EXPECT_NEAR(gaps[2] / gaps[1], 1e-2, 1e-3);
}

TEST(PostulateGap, SingularFieldThrows) {
    EXPECT_THROW(postulate_gap(Mat4<double>{}, 1.0), DomainError);
}

TEST(EffectiveMetricField, MatchesPointwiseProduct) {
    ExprGrid src{};
    src[0][0] = "1+0.1*x";
    src[1][2] = "0.1*sin(t)";
    const auto h = DistortionField::parse(unit_box_chart(), src);
    const auto g = effective_metric_field(h, src);
    const Point p{0.2, 0.1, -0.3, 0.0};
    const auto want = effective_metric(h.value(p));
    const auto got = g.value(p);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_NEAR(got[i][j], want[i][j], 1e-15);
}
