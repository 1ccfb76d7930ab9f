#include <gtest/gtest.h>

#include "lyap/mapspec.hpp"
#include "lyap/preimage.hpp"

using namespace lyap;
using P = ProjectivePoint<double>;
using C = std::complex<double>;

namespace {
const double ln2 = std::log(2.0);
}

TEST(Preimages, MultiplicitiesSumToDegree)
{
    auto f = make_map("lattes4");
    P a = P::affine(C(0.3, 0.2));
    auto pre = preimages(f, a);
    long m = 0;
    for (const auto& w : pre) {
        m += w.multiplicity;
        EXPECT_LT(chordal_dist(f(w.point), a), 1e-12);
    }
    EXPECT_EQ(m, 4);
}

TEST(PreimageTree, LevelMass)
{
    auto f = make_map("chebyshev:2");
    auto tree = build_preimage_tree(f, P::affine(0.5), 6);
    for (int j = 0; j <= 6; ++j)
        EXPECT_EQ(tree.level_mass(j), 1L << j);
    EXPECT_THROW(build_preimage_tree(f, P::affine(0.5), 17), BudgetExceeded);
}

TEST(EstimatorPreimage, PowerMapIsExact)
{
    auto s = estimator_preimage(make_map("power:2"), P::affine(1.0), 12);
    ASSERT_EQ(s.rows.size(), 12u);
    for (const auto& r : s.rows) {
        EXPECT_NEAR(r.estimate, ln2, 1e-12);
        EXPECT_EQ(r.n_points, 1L << r.k);
    }
}

TEST(EstimatorPreimage, ChebyshevConverges)
{
    auto s = estimator_preimage(make_map("chebyshev:2"), P::affine(0.5), 10);
    EXPECT_NEAR(s.rows.back().estimate, ln2, 5e-2);
    EXPECT_LT(std::abs(s.rows.back().estimate - ln2), std::abs(s.rows[1].estimate - ln2));
}

TEST(EstimatorPreimage, RefusesScreenedTargets)
{
    auto f = make_map("power:2");
    EXPECT_THROW(estimator_preimage(f, P::affine(0.0), 3), TargetRejected);
    auto cheb = make_map("chebyshev:2");
    EXPECT_THROW(estimator_preimage(cheb, P::affine(2.0), 3), TargetRejected);
    EXPECT_THROW(estimator_preimage(cheb, P::infinity(), 3), TargetRejected);
}

TEST(EstimatorPreimage, ForcedCriticalTargetGivesMinusInfinity)
{
    PreimageOptions o;
    o.force = true;
    auto s = estimator_preimage(make_map("power:2"), P::affine(0.0), 2, PreimageMode::full(), o);
    for (const auto& r : s.rows) {
        EXPECT_TRUE(r.minus_infinity);
        EXPECT_TRUE(std::isinf(r.estimate) && r.estimate < 0);
        EXPECT_FALSE(r.failed);
    }
}

TEST(EstimatorPreimage, FullModeBudget)
{
    EXPECT_THROW(estimator_preimage(make_map("lattes4"), P::affine(C(0.3, 0.2)), 9), BudgetExceeded);
}

TEST(EstimatorPreimage, SampledModeIsReproducible)
{
    auto f = make_map("chebyshev:2");
    auto a = estimator_preimage(f, P::affine(0.5), 5, PreimageMode::monte_carlo(500, 17));
    auto b = estimator_preimage(f, P::affine(0.5), 5, PreimageMode::monte_carlo(500, 17));
    auto c = estimator_preimage(f, P::affine(0.5), 5, PreimageMode::monte_carlo(500, 18));
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].estimate, b.rows[i].estimate);
        EXPECT_EQ(*a.rows[i].std_error, *b.rows[i].std_error);
    }
    EXPECT_NE(a.rows.back().estimate, c.rows.back().estimate);
    EXPECT_EQ(a.estimator, "preimage_mc");
}

TEST(EstimatorPreimage, SampledMatchesFullTree)
{
    auto f = make_map("chebyshev:2");
    auto full = estimator_preimage(f, P::affine(0.5), 5);
    auto mc = estimator_preimage(f, P::affine(0.5), 5, PreimageMode::monte_carlo(4000, 3));
    for (int k = 0; k < 5; ++k)
        EXPECT_LE(std::abs(mc.rows[k].estimate - full.rows[k].estimate), 3 * *mc.rows[k].std_error + 1e-12) << k + 1;
}

TEST(BackwardOrbit, PathIsConsistent)
{
    auto f = make_map("quadratic:3");
    auto path = backward_orbit_sample(f, P::affine(0.7), 20, 9, 4);
    ASSERT_FALSE(path.failed);
    ASSERT_EQ(path.points.size(), 21u);
    for (std::size_t j = 0; j + 1 < path.points.size(); ++j)
        EXPECT_LT(chordal_dist(f(path.points[j + 1]), path.points[j]), 1e-10);
}
