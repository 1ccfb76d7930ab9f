#include <gtest/gtest.h>

#include <random>

#include "lyap/mapspec.hpp"

using namespace lyap;
using P = ProjectivePoint<double>;
using C = std::complex<double>;

namespace {

C eval_affine(const std::vector<C>& c, C z)
{
    C v = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it)
        v = v * z + *it;
    return v;
}

RationalMap<double> random_map(std::mt19937_64& rng, int d)
{
    std::normal_distribution<double> g;
    std::vector<C> num(d + 1), den(d + 1);
    for (int i = 0; i <= d; ++i) {
        num[i] = C(g(rng), g(rng));
        den[i] = C(g(rng), g(rng));
    }
    return RationalMap<double>::build(num, den);
}

} // namespace

TEST(RationalMap, RejectsCommonFactor)
{
    // (z - 1)(z + 2) / ((z - 1)(z - 3))
    EXPECT_THROW(build_map<double>({C(-2), C(1), C(1)}, {C(3), C(-4), C(1)}), DegenerateMap);
    EXPECT_THROW(build_map<double>({C(1), C(2)}, {C(2), C(4)}), DegenerateMap);
    EXPECT_THROW(build_map<double>({C(1), C(2)}, {C(2)}), Error);
    EXPECT_THROW(build_map<double>({C(1), C(0)}, {C(2), C(0)}), DegenerateMap);
}

TEST(RationalMap, ResultantOfPowerMap)
{
    auto f = make_map("power:2");
    EXPECT_NEAR(std::abs(f.resultant()), 1.0, 1e-15);
    EXPECT_EQ(f.degree(), 2);
    EXPECT_TRUE(f.is_polynomial());
    EXPECT_FALSE(make_map("lattes4").is_polynomial());
}

TEST(RationalMap, StripsSharedTopZeros)
{
    auto f = build_map<double>({C(1), C(0), C(0)}, {C(0), C(1), C(0)});
    EXPECT_EQ(f.degree(), 1);
}

TEST(RationalMap, EvaluateMatchesAffine)
{
    std::mt19937_64 rng(2);
    auto f = random_map(rng, 3);
    std::normal_distribution<double> g;
    for (int i = 0; i < 100; ++i) {
        C z(g(rng), g(rng));
        C want = eval_affine(f.num(), z) / eval_affine(f.den(), z);
        EXPECT_LT(chordal_dist(f(P::affine(z)), P::affine(want)), 1e-13);
    }
    auto sq = make_map("power:2");
    EXPECT_TRUE(sq(P::infinity()).is_infinity());
    EXPECT_NEAR(std::abs(sq(P::affine(3.0)).value() - 9.0), 0.0, 1e-13);
}

TEST(RationalMap, ChordalDerivativeMatchesAffineFormula)
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int m = 0; m < 5; ++m) {
        auto f = random_map(rng, 2 + m);
        for (int i = 0; i < 50; ++i) {
            C z(g(rng), g(rng));
            C fz = eval_affine(f.num(), z) / eval_affine(f.den(), z);
            C df = affine_derivative(f, z);
            double want = std::abs(df) * (1 + std::norm(z)) / (1 + std::norm(fz));
            EXPECT_NEAR(chordal_derivative(f, P::affine(z)) / want, 1.0, 1e-10);
        }
    }
}

TEST(RationalMap, ChordalDerivativeAtInfinity)
{
    auto f = make_map("power:2");
    EXPECT_NEAR(chordal_derivative(f, P::infinity()), 0.0, 1e-15);
    EXPECT_NEAR(chordal_derivative(f, P::affine(C(0.6, 0.8))), 2.0, 1e-14);
    // 1/z is an isometry
    auto inv = build_map<double>({C(1), C(0)}, {C(0), C(1)});
    EXPECT_NEAR(chordal_derivative(inv, P::infinity()), 1.0, 1e-15);
    EXPECT_NEAR(chordal_derivative(inv, P::affine(C(2.5, -1))), 1.0, 1e-14);
}

TEST(RationalMap, ComposeAgreesWithIteration)
{
    std::mt19937_64 rng(4);
    auto f = random_map(rng, 2);
    auto g = random_map(rng, 3);
    auto fg = compose(f, g);
    EXPECT_EQ(fg.degree(), 6);
    std::normal_distribution<double> n;
    for (int i = 0; i < 50; ++i) {
        P z = P::affine(C(n(rng), n(rng)));
        EXPECT_LT(chordal_dist(fg(z), f(g(z))), 1e-10);
    }
    auto f3 = iterate_map(f, 3);
    EXPECT_EQ(f3.degree(), 8);
    P z = P::affine(C(0.3, 0.1));
    EXPECT_LT(chordal_dist(f3(z), f.iterate(z, 3)), 1e-10);
}

TEST(RationalMap, DegreeBudget)
{
    auto f = make_map("power:2");
    EXPECT_THROW(iterate_map(f, 20, 1L << 16), BudgetExceeded);
    EXPECT_EQ(checked_power(2, 16, 1L << 16), 1L << 16);
    EXPECT_EQ(checked_power(2, 17, 1L << 16), -1);
}

TEST(RationalMap, FiberHasFullMultiplicity)
{
    auto f = make_map("lattes4");
    P a = P::affine(C(0.3, 0.2));
    auto pre = fiber(f, a);
    EXPECT_EQ(pre.total_multiplicity(), 4);
    for (const auto& r : pre.roots)
        EXPECT_LT(chordal_dist(f(r.point), a), 1e-12);
    auto sq = fiber(make_map("power:2"), P::affine(0.0));
    ASSERT_EQ(sq.roots.size(), 1u);
    EXPECT_EQ(sq.roots[0].multiplicity, 2);
}

TEST(CriticalPoints, CountAndValues)
{
    auto cheb = critical_points(make_map("chebyshev:2"));
    EXPECT_EQ(cheb.total_multiplicity(), 2);
    bool zero = false, inf = false;
    for (const auto& c : cheb.points) {
        zero = zero || (!c.point.is_infinity() && std::abs(c.point.value()) < 1e-12);
        inf = inf || c.point.is_infinity();
    }
    EXPECT_TRUE(zero);
    EXPECT_TRUE(inf);

    auto lat = critical_points(make_map("lattes4"));
    EXPECT_EQ(lat.total_multiplicity(), 6);
    auto cube = critical_points(make_map("power:3"));
    EXPECT_EQ(cube.total_multiplicity(), 4);
    for (const auto& c : cube.points)
        EXPECT_EQ(c.multiplicity, 2);
}

TEST(CriticalPoints, OrbitClassification)
{
    auto f = make_map("chebyshev:2");
    auto set = classify_critical_orbits(f, critical_points(f));
    for (const auto& c : set.points) {
        EXPECT_EQ(c.orbit, OrbitClass::preperiodic);
        if (!c.point.is_infinity()) {
            EXPECT_EQ(c.preperiod, 2);
            EXPECT_EQ(c.period, 1);
        }
    }
    // z^2 + 3: the finite critical orbit tends to infinity without landing
    auto g = make_map("quadratic:3");
    auto gs = classify_critical_orbits(g, critical_points(g));
    for (const auto& c : gs.points)
        if (!c.point.is_infinity())
            EXPECT_NE(c.orbit, OrbitClass::preperiodic);
    // z^2 + i: 0 -> i -> -1+i -> -i -> -1+i, strictly preperiodic
    auto h = make_map("quadratic:i");
    auto hs = classify_critical_orbits(h, critical_points(h));
    for (const auto& c : hs.points)
        if (!c.point.is_infinity()) {
            EXPECT_EQ(c.orbit, OrbitClass::preperiodic);
            EXPECT_EQ(c.preperiod, 2);
            EXPECT_EQ(c.period, 2);
        }
}

TEST(Exceptional, KnownSets)
{
    auto z2 = exceptional_points(make_map("power:2"));
    EXPECT_EQ(z2.size(), 2u);
    auto cheb = exceptional_points(make_map("chebyshev:2"));
    ASSERT_EQ(cheb.size(), 1u);
    EXPECT_TRUE(cheb[0].is_infinity());
    EXPECT_TRUE(exceptional_points(make_map("lattes4")).empty());
}

TEST(MapSpec, Presets)
{
    auto t3 = chebyshev_coefficients(3);
    ASSERT_EQ(t3.size(), 4u);
    EXPECT_EQ(t3[0], 0.0);
    EXPECT_EQ(t3[1], -3.0);
    EXPECT_EQ(t3[2], 0.0);
    EXPECT_EQ(t3[3], 1.0);
    EXPECT_EQ(make_map("chebyshev:4").degree(), 4);
    EXPECT_THROW(parse_preset("power:1"), ConfigError);
    EXPECT_THROW(parse_preset("lattes5"), UnknownPreset);
    EXPECT_THROW(parse_preset("rabbit"), UnknownPreset);
}

TEST(MapSpec, ComplexParsing)
{
    EXPECT_EQ(parse_complex("3"), C(3, 0));
    EXPECT_EQ(parse_complex("-0.12+0.75i"), C(-0.12, 0.75));
    EXPECT_EQ(parse_complex("0.1-0.6i"), C(0.1, -0.6));
    EXPECT_EQ(parse_complex("2i"), C(0, 2));
    EXPECT_EQ(parse_complex("-i"), C(0, -1));
    EXPECT_EQ(parse_complex("1.5,-2"), C(1.5, -2));
    EXPECT_EQ(parse_complex("1e-3"), C(1e-3, 0));
    EXPECT_THROW(parse_complex("abc"), ConfigError);
    EXPECT_TRUE(parse_point("inf").is_infinity());
}
