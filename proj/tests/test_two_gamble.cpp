#include <gtest/gtest.h>

#include <random>

#include "riskdom/two_gamble.hpp"
#include "support/oracles.hpp"

using namespace riskdom;

namespace {

const Gamble x11 = Gamble::fifty_fifty(11, 10);
const Gamble zero = Gamble::degenerate(0.0);

/// Worst rescaled weighted integral over the union of supports, by quadrature.
double weighted_worst_by_quadrature(const Gamble& x, const Gamble& y, double s) {
  double worst = 0.0;
  for (const auto* g : {&x, &y})
    for (const auto& o : g->outcomes())
      worst = std::min(worst, oracle::weighted_integral_quad(x, y, s, o.value));
  return worst;
}

std::pair<Gamble, Gamble> random_pair(std::mt19937_64& rng) {
  while (true) {
    const auto x = oracle::random_any_gamble(rng, 4, 50.0);
    const auto y = oracle::random_any_gamble(rng, 4, 50.0);
    if (!(x == y) && x.max() != y.max()) return {x, y};
  }
}

}  // namespace

TEST(StrongConvex, Examples) {
  const auto r = strong_convex_dominance(Gamble::fifty_fifty(110, 100), Gamble::fifty_fifty(55, 50));
  EXPECT_TRUE(r.verdict);
  EXPECT_NEAR(r.worst_margin, 2.5, 1e-12);
  EXPECT_FALSE(strong_convex_dominance(Gamble::fifty_fifty(55, 50), Gamble::fifty_fifty(110, 100))
                   .verdict);
  // A sure dollar never beats a gamble with a higher maximum.
  EXPECT_FALSE(strong_convex_dominance(Gamble::degenerate(1.0), Gamble::fifty_fifty(2, 2)).verdict);
  EXPECT_THROW(strong_convex_dominance(x11, x11), error);
}

TEST(WeightedCriterion, MatchesQuadrature) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 100; ++i) {
    const auto [x, y] = random_pair(rng);
    for (double s : {3.0, 40.0, 500.0}) {
      const auto r = weighted_integral_criterion(x, y, s);
      const double ref = weighted_worst_by_quadrature(x, y, s);
      EXPECT_NEAR(r.worst_margin, ref, 1e-9 * (s + 50.0)) << "instance " << i << " s " << s;
    }
  }
}

TEST(WeightedCriterion, ConstantComparisonCollapsesToRiskiness) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 50; ++i) {
    const auto x = oracle::random_gamble(rng);
    const double r = riskiness(x).riskiness;
    EXPECT_TRUE(weighted_integral_criterion(x, zero, r * 1.001).verdict);
    EXPECT_FALSE(weighted_integral_criterion(x, zero, r * 0.999).verdict);
    EXPECT_NEAR(min_s_for_dominance(x, zero), r, 1e-9 * r);
  }
  EXPECT_NEAR(min_s_for_dominance(x11, zero), 110.0832324324, 1e-6);
}

TEST(MinS, Examples) {
  const auto r =
      min_s_for_dominance_detail(Gamble::fifty_fifty(110, 100), Gamble::fifty_fifty(55, 50));
  EXPECT_NEAR(r.s, 1652.36, 0.01);
  EXPECT_TRUE(r.monotone_verified);
  EXPECT_TRUE(std::isinf(min_s_for_dominance(Gamble::degenerate(1.0), Gamble::fifty_fifty(2, 2))));
  // Y is a sure loss below everything X can pay: any s works.
  EXPECT_EQ(min_s_for_dominance(Gamble::fifty_fifty(5, 1), Gamble::degenerate(-3.0)), 0.0);
}

TEST(MinS, BracketsTheCriterion) {
  std::mt19937_64 rng(47);
  int finite = 0;
  for (int i = 0; i < 100; ++i) {
    const auto [x, y] = random_pair(rng);
    const auto r = min_s_for_dominance_detail(x, y);
    if (!std::isfinite(r.s) || r.s == 0.0) continue;
    ++finite;
    EXPECT_TRUE(weighted_integral_criterion(x, y, r.s * (1 + 1e-9)).verdict) << i;
    EXPECT_FALSE(weighted_integral_criterion(x, y, r.s * (1 - 1e-6)).verdict) << i;
  }
  EXPECT_GT(finite, 10);
}

TEST(MinS, FiniteExactlyWhenStronglyConvexDominant) {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 500; ++i) {
    const auto [x, y] = random_pair(rng);
    const bool finite = std::isfinite(min_s_for_dominance(x, y));
    EXPECT_EQ(finite, strong_convex_dominance(x, y).verdict) << "instance " << i;
  }
}

TEST(WeightedCriterion, MonotoneInS) {
  std::mt19937_64 rng(57);
  for (int i = 0; i < 200; ++i) {
    const auto [x, y] = random_pair(rng);
    bool held = false;
    for (double s = 1e-2; s < 1e7; s *= 1.5) {
      const bool ok = weighted_integral_criterion(x, y, s).verdict;
      if (held) {
        EXPECT_TRUE(ok) << "instance " << i << " s " << s;
      }
      held = held || ok;
    }
    EXPECT_TRUE(min_s_for_dominance_detail(x, y).monotone_verified) << i;
  }
}

TEST(MinS, ScaleHomogeneity) {
  std::mt19937_64 rng(59);
  for (int i = 0; i < 50; ++i) {
    const auto [x, y] = random_pair(rng);
    const double s = min_s_for_dominance(x, y);
    if (!std::isfinite(s)) continue;
    for (double t : {0.1, 7.0})
      EXPECT_NEAR(min_s_for_dominance(scale(x, t), scale(y, t)), t * s, 1e-8 * t * (s + 1.0));
  }
}

TEST(MinS, Errors) {
  try {
    min_s_for_dominance(x11, x11);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::identical_distributions);
  }
  try {
    min_s_for_dominance(x11, Gamble::fifty_fifty(11, 5));
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::equal_maxima);
  }
  EXPECT_THROW(weighted_integral_criterion(x11, zero, 0.0), error);
}

TEST(TwoSided, LaplaceExample) {
  const auto x = Gamble::degenerate(1.0), y = Gamble::fifty_fifty(2, 2);
  const auto r = two_sided_sufficiency(x, y, BackgroundRisk::laplace(0.0, 50.0));
  EXPECT_TRUE(r.grid.verdict);
  EXPECT_DOUBLE_EQ(r.s_star, 50.0);
  ASSERT_TRUE(r.laplace_flip.has_value());
  EXPECT_NEAR(*r.laplace_flip, 1.641, 0.01);
  EXPECT_TRUE(r.size_exceeds_flip);

  const auto small = two_sided_sufficiency(x, y, BackgroundRisk::laplace(0.0, 1.0));
  EXPECT_FALSE(small.grid.verdict);
  EXPECT_FALSE(small.size_exceeds_flip);
}

TEST(TwoSided, DominanceAgreesAboveFlip) {
  const auto x = Gamble::fifty_fifty(110, 100), y = Gamble::fifty_fifty(55, 50);
  const auto r = two_sided_sufficiency(x, y, BackgroundRisk::logistic(0.0, 2000.0));
  ASSERT_TRUE(r.laplace_flip.has_value());
  for (double f : {1.01, 2.0, 10.0}) {
    const auto w = BackgroundRisk::laplace(0.0, f * *r.laplace_flip);
    EXPECT_TRUE(two_sided_sufficiency(x, y, w).grid.verdict) << f;
  }
  EXPECT_FALSE(
      two_sided_sufficiency(x, y, BackgroundRisk::laplace(0.0, 0.9 * *r.laplace_flip)).grid.verdict);
}

TEST(TwoSided, ConstantAlternativeReducesToFosd) {
  for (double lambda : {50.0, 100.0, 110.3, 200.0}) {
    const auto w = BackgroundRisk::laplace(0.0, lambda);
    EXPECT_EQ(two_sided_sufficiency(x11, zero, w).grid.verdict,
              fosd_verify(x11, w).verdict == Verdict::dominant)
        << lambda;
  }
}

TEST(TwoSided, PairMarginMatchesDifferenceOfCdfs) {
  const auto x = Gamble::fifty_fifty(11, 10), y = Gamble::fifty_fifty(4, 3);
  const auto w = BackgroundRisk::normal(0.0, 20.0);
  for (double a = -80; a <= 80; a += 9.5) {
    double fy = 0, fx = 0;
    for (const auto& o : x.outcomes()) fx += o.probability * w.cdf(a - o.value);
    for (const auto& o : y.outcomes()) fy += o.probability * w.cdf(a - o.value);
    EXPECT_NEAR(pair_margin(x, y, w, a), fy - fx, 1e-14);
  }
}

TEST(TwoSided, Errors) {
  EXPECT_THROW(two_sided_sufficiency(Gamble::fifty_fifty(55, 50), Gamble::fifty_fifty(110, 100),
                                     BackgroundRisk::laplace(0, 1)),
               error);
  EXPECT_THROW(two_sided_sufficiency(x11, x11, BackgroundRisk::laplace(0, 1)), error);
}
