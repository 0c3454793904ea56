#include <gtest/gtest.h>

#include <random>

#include "riskdom/verify.hpp"
#include "support/oracles.hpp"

using namespace riskdom;

namespace {

const Gamble x11 = Gamble::fifty_fifty(11, 10);

/// E[u((W + tX) v ell)] - E[u(W v ell)] by plain quadrature of the definition.
double utility_difference_by_quadrature(const Gamble& x, const BackgroundRisk& w, double ell,
                                        double c, double t) {
  using boost::math::quadrature::gauss_kronrod;
  auto u = [&](double a) { return -std::expm1(-std::max(a, ell) / c); };
  std::vector<double> cuts{ell, w.mean()};
  for (const auto& o : x.outcomes()) cuts.push_back(ell - t * o.value);
  for (double k : w.kinks()) cuts.push_back(k);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto f = [&](double a) {
    double s = -u(a);
    for (const auto& o : x.outcomes()) s += o.probability * u(a + t * o.value);
    return s * w.density(a);
  };
  const double inf = std::numeric_limits<double>::infinity();
  double total = gauss_kronrod<double, 61>::integrate(f, -inf, cuts.front(), 20, 1e-14);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 20, 1e-14);
  total += gauss_kronrod<double, 61>::integrate(f, cuts.back(), inf, 20, 1e-14);
  return total;
}

}  // namespace

TEST(SplitMix, CounterModeIsStable) {
  // First output of the reference SplitMix64 seeded with 0.
  EXPECT_EQ(SplitMix64::at(0, 0), 0xe220a8397b1dcdafULL);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = SplitMix64::unit(SplitMix64::at(7, i));
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(MonteCarlo, DominantCaseIsConsistent) {
  const auto r = mc_fosd_oracle(x11, BackgroundRisk::laplace(0.0, 110.3));
  EXPECT_EQ(r.verdict, OracleVerdict::consistent_with_dominance);
  EXPECT_GT(r.worst_z, -4.0);
  EXPECT_EQ(r.samples, 1'000'000u);
  EXPECT_EQ(r.grid_points, 512u);
}

TEST(MonteCarlo, ViolationFoundWellBelowRiskiness) {
  const auto r = mc_fosd_oracle(x11, BackgroundRisk::laplace(0.0, 50.0));
  EXPECT_EQ(r.verdict, OracleVerdict::violation_found);
  EXPECT_LT(r.worst_z, -4.0);
  EXPECT_LT(r.witness_a, 0.0);
}

TEST(MonteCarlo, PinnedGoldenForSeed42) {
  const auto r = mc_fosd_oracle(x11, BackgroundRisk::laplace(0.0, 50.0));
  EXPECT_NEAR(r.worst_z, -6.88, 0.01);
}

TEST(MonteCarlo, IndependentOfThreadCount) {
  OracleConfig one;
  one.samples = 300'000;
  OracleConfig four = one;
  four.threads = 4;
  const auto w = BackgroundRisk::logistic(0.0, 40.0);
  const auto a = mc_fosd_oracle(x11, w, one), b = mc_fosd_oracle(x11, w, four);
  EXPECT_EQ(a.worst_z, b.worst_z);
  EXPECT_EQ(a.witness_a, b.witness_a);
  EXPECT_EQ(a.worst_margin, b.worst_margin);
}

TEST(MonteCarlo, RejectsTooFewSamples) {
  OracleConfig cfg;
  cfg.samples = 100;
  EXPECT_THROW(mc_fosd_oracle(x11, BackgroundRisk::laplace(0, 1), cfg), error);
}

TEST(BruteForce, HandInstanceMatchesLiteralOracle) {
  // W on three points, X a two-point gamble.
  const DiscretizedLottery w({-1.0, 0.0, 2.0}, {0.25, 0.5, 0.25});
  const Gamble up({{1.0, 0.5}, {3.0, 0.5}});
  const Gamble down({{-1.0, 0.5}, {3.0, 0.5}});
  const std::vector<double> wv{-1.0, 0.0, 2.0}, wp{0.25, 0.5, 0.25};
  EXPECT_TRUE(brute_force_fosd(up, w));
  EXPECT_TRUE(oracle::brute_fosd_literal(up, wv, wp));
  EXPECT_FALSE(brute_force_fosd(down, w));
  EXPECT_FALSE(oracle::brute_fosd_literal(down, wv, wp));
  const auto r = brute_force_fosd_detail(down, w);
  EXPECT_DOUBLE_EQ(r.worst_margin, -0.125);  // at a = -2, only W + X reaches
  EXPECT_EQ(r.witness_a, -2.0);
}

TEST(BruteForce, AgreesWithLiteralOracleOnRandomInstances) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-30.0, 30.0), p(0.05, 1.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::pair<double, double>> pts;
    double total = 0.0;
    for (int k = 0; k < 8; ++k) {
      pts.push_back({std::round(u(rng)), p(rng)});
      total += pts.back().second;
    }
    for (auto& pt : pts) pt.second /= total;
    const auto w = DiscretizedLottery::from_points(pts);
    const auto x = oracle::random_any_gamble(rng, 3, 10.0);
    const std::vector<double> wv(w.values().begin(), w.values().end());
    const std::vector<double> wp(w.probabilities().begin(), w.probabilities().end());
    EXPECT_EQ(brute_force_fosd(x, w, 1e-12), oracle::brute_fosd_literal(x, wv, wp, 1e-12)) << i;
  }
}

TEST(BruteForce, DiscretisedLaplaceAgreesWithAnalyticVerdict) {
  const auto w = discretize(BackgroundRisk::laplace(0.0, 200.0), 10000);
  EXPECT_TRUE(brute_force_fosd(x11, w, 2 * w.max_mass()));
  const auto narrow = discretize(BackgroundRisk::laplace(0.0, 50.0), 10000);
  EXPECT_FALSE(brute_force_fosd(x11, narrow, 2 * narrow.max_mass()));
}

TEST(SmallNegativeGamble, UtilityDifferenceMatchesQuadrature) {
  const auto x = Gamble::fifty_fifty(10, 11);
  const auto w = BackgroundRisk::laplace(100.0, 110.0);
  for (double t : {1.0, 0.25, 1.0 / 64}) {
    const double ref = utility_difference_by_quadrature(x, w, 0.0, 100.0, t);
    EXPECT_NEAR(truncated_utility_difference(x, w, 0.0, 100.0, t), ref,
                1e-9 * std::abs(ref) + 1e-15)
        << "t=" << t;
  }
  const auto wn = BackgroundRisk::normal(5.0, 30.0);
  const double ref = utility_difference_by_quadrature(x, wn, 0.0, 40.0, 0.5);
  EXPECT_NEAR(truncated_utility_difference(x, wn, 0.0, 40.0, 0.5), ref, 1e-9 * std::abs(ref));
}

TEST(SmallNegativeGamble, RejectedAtEveryScale) {
  const auto r = small_negative_gamble_rejection(Gamble::fifty_fifty(10, 11),
                                                 BackgroundRisk::laplace(100.0, 110.0), 0.0, 100.0);
  EXPECT_EQ(r.t_bar, 1.0);
  ASSERT_EQ(r.sweep.size(), 21u);
  for (const auto& p : r.sweep) EXPECT_LT(p.difference, 0.0) << "t=" << p.t;
}

TEST(SmallNegativeGamble, RejectedForSmallScalesEvenWhenLargeOnesPass) {
  // A very convex utility region: large stakes may be accepted because the
  // floor absorbs the loss, small ones never are.
  const Gamble x({{100.0, 0.5}, {-101.0, 0.5}});
  const auto r = small_negative_gamble_rejection(x, BackgroundRisk::normal(20.0, 5.0), 0.0, 10.0);
  EXPECT_LE(r.t_bar, 1.0);
  for (const auto& p : r.sweep) {
    if (p.t <= r.t_bar) {
      EXPECT_LT(p.difference, 0.0);
    }
  }
}

TEST(SmallNegativeGamble, Preconditions) {
  const auto w = BackgroundRisk::laplace(100.0, 110.0);
  try {
    small_negative_gamble_rejection(x11, w, 0.0, 100.0);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::precondition_violated);
  }
  EXPECT_THROW(small_negative_gamble_rejection(Gamble::fifty_fifty(10, 11), w, 0.0, 0.0), error);
  EXPECT_THROW(small_negative_gamble_rejection(Gamble::fifty_fifty(10, 11),
                                               BackgroundRisk::normal(-1e4, 1.0), 0.0, 1.0),
               error);
}
