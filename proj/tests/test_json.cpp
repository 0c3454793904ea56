#include <gtest/gtest.h>

#include "riskdom/json_io.hpp"

using namespace riskdom;
namespace jio = riskdom::json_io;

TEST(Json, GambleRoundTrip) {
  const Gamble g({{11.0, 0.5}, {-10.0, 0.5}});
  const auto back = jio::gamble_from_json(jio::parse(jio::to_json(g).dump()));
  EXPECT_EQ(back, g);
  const auto d = Gamble::degenerate(2.5);
  EXPECT_EQ(jio::gamble_from_json(jio::to_json(d)), d);
}

TEST(Json, GambleValidation) {
  EXPECT_THROW(jio::gamble_from_json(jio::parse(R"({"outcomes":[{"x":1,"p":0.7}]})")), error);
  EXPECT_THROW(jio::gamble_from_json(jio::parse(R"({"outcomes":[{"x":"a","p":1}]})")), error);
  EXPECT_THROW(jio::gamble_from_json(jio::parse(R"({"outs":[]})")), error);
  EXPECT_THROW(jio::parse("{not json"), error);
}

TEST(Json, DistributionRoundTrip) {
  for (const auto& w : {BackgroundRisk::laplace(1.0, 2.0), BackgroundRisk::logistic(-3.0, 4.0),
                        BackgroundRisk::normal(1e5, 3319.0),
                        BackgroundRisk::piecewise({-1.0, 1.0}, {{1.0 / 3.0 - 0.25, 1.0 / 3.0, 0.0},
                                                                {0.0, 0.0, -0.25},
                                                                {0.25, -0.5, 0.0}}),
                        BackgroundRisk::piecewise({-1.0, 1.0}, {{1.0 / 3.0 - 0.25, 1.0 / 3.0, 0.0},
                                                                {0.0, 0.0, -0.25},
                                                                {0.25, -0.5, 0.0}})
                            .shifted(1e4)}) {
    const auto back = jio::dist_from_json(jio::parse(jio::to_json(w).dump()));
    EXPECT_EQ(back.family(), w.family());
    for (double p : {0.01, 0.3, 0.5, 0.9}) {
      const double a = w.quantile(p);
      EXPECT_DOUBLE_EQ(back.cdf(a), w.cdf(a));
    }
  }
  EXPECT_THROW(jio::dist_from_json(jio::parse(R"({"family":"cauchy","loc":0,"scale_or_sigma":1})")),
               error);
  EXPECT_THROW(jio::dist_from_json(jio::parse(R"({"family":"normal","loc":0,"scale_or_sigma":-1})")),
               error);
}

TEST(Json, DominanceReportRoundTrip) {
  const auto r = fosd_verify(Gamble::fifty_fifty(11, 10), BackgroundRisk::laplace(0.0, 100.0));
  const auto back = jio::dominance_report_from_json(jio::parse(jio::to_json(r).dump()));
  EXPECT_EQ(back.verdict, r.verdict);
  EXPECT_EQ(back.worst_margin, r.worst_margin);
  EXPECT_EQ(back.witness_a, r.witness_a);
  EXPECT_EQ(back.method, r.method);
  EXPECT_EQ(back.grid.points, r.grid.points);
  EXPECT_EQ(back.tail_coefficient, r.tail_coefficient);

  // Closed-form checks carry NaN witnesses, which travel as strings.
  const auto t = fosd_theorem_check(Gamble::fifty_fifty(11, 10), BackgroundRisk::laplace(0, 200));
  const auto j = jio::to_json(t);
  EXPECT_EQ(j["witness_a"], "nan");
  EXPECT_TRUE(std::isnan(jio::dominance_report_from_json(j).witness_a));
  EXPECT_EQ(j["verdict"], "SufficientConditionMet");
}

TEST(Json, PairReportRoundTrip) {
  const auto r = weighted_integral_criterion(Gamble::fifty_fifty(110, 100),
                                             Gamble::fifty_fifty(55, 50), 2000.0);
  const auto back = jio::pair_report_from_json(jio::parse(jio::to_json(r).dump()));
  EXPECT_EQ(back.verdict, r.verdict);
  EXPECT_EQ(back.worst_margin, r.worst_margin);
  EXPECT_EQ(back.witness_a, r.witness_a);
  EXPECT_EQ(back.s_used, r.s_used);
}

TEST(Json, NonFiniteNumbers) {
  EXPECT_EQ(jio::number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(jio::read_number(jio::json("-inf"), "v"), -std::numeric_limits<double>::infinity());
  EXPECT_THROW(jio::read_number(jio::json("many"), "v"), error);
}
