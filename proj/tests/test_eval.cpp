#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "tebc/eval.hpp"

using namespace tebc;

TEST(ExpectedLogLoss, WorkedValues) {
  const Distribution p({0.5, 0.5});
  EXPECT_NEAR(expected_log_loss(p, p, 10), 10.0 * std::log(2.0), 1e-12);
  EXPECT_EQ(expected_log_loss(p, Distribution({1.0, 0.0}), 10), std::numeric_limits<double>::infinity());
  // Real mass absent where the estimate is zero is harmless.
  EXPECT_NEAR(expected_log_loss(Distribution({1.0, 0.0}), Distribution({1.0, 0.0}), 3), 0.0, 1e-15);
  EXPECT_THROW(expected_log_loss(p, Distribution::uniform(3), 10), std::invalid_argument);
}

TEST(PerformanceScore, AffineBestOneWorstZero) {
  const auto ps = performance_score({{"a", 0.0151}, {"b", 0.0181}, {"c", 0.0166}});
  EXPECT_DOUBLE_EQ(ps.at("a"), 1.0);
  EXPECT_DOUBLE_EQ(ps.at("b"), 0.0);
  EXPECT_NEAR(ps.at("c"), 0.5, 1e-12);
}

TEST(PerformanceScore, DegenerateTables) {
  EXPECT_DOUBLE_EQ(performance_score({{"only", 3.0}}).at("only"), 1.0);
  const auto tie = performance_score({{"a", 2.0}, {"b", 2.0}});
  EXPECT_DOUBLE_EQ(tie.at("a"), 1.0);
  EXPECT_DOUBLE_EQ(tie.at("b"), 1.0);
  const double inf = std::numeric_limits<double>::infinity();
  const auto with_inf = performance_score({{"a", 1.0}, {"b", 3.0}, {"c", inf}});
  EXPECT_DOUBLE_EQ(with_inf.at("a"), 1.0);
  EXPECT_DOUBLE_EQ(with_inf.at("b"), 0.0);
  EXPECT_DOUBLE_EQ(with_inf.at("c"), 0.0);
  EXPECT_FALSE(std::signbit(with_inf.at("b")));
  EXPECT_THROW(performance_score({}), std::invalid_argument);
  EXPECT_THROW(performance_score({{"a", std::nan("")}}), std::invalid_argument);
}

TEST(PerformanceScore, InvariantToLogBase) {
  // Rescaling every value by 1/ln 2 leaves scores unchanged.
  std::map<std::string, double> nats{{"a", 0.3}, {"b", 0.9}, {"c", 0.45}};
  std::map<std::string, double> bits;
  for (const auto& [k, v] : nats) bits[k] = v / std::log(2.0);
  const auto x = performance_score(nats), y = performance_score(bits);
  for (const auto& [k, v] : x) EXPECT_NEAR(v, y.at(k), 1e-14);
}

TEST(ScoreTable, Modes) {
  const std::map<std::string, std::vector<double>> reps{{"a", {1.0, 4.0}}, {"b", {2.0, 2.0}}};
  const auto avg = score_table(reps, PsMode::AverageThenScore);
  EXPECT_DOUBLE_EQ(avg.at("a").mean_value, 2.5);
  EXPECT_DOUBLE_EQ(avg.at("a").performance_score, 0.0);
  EXPECT_DOUBLE_EQ(avg.at("b").performance_score, 1.0);
  const auto per = score_table(reps, PsMode::ScoreThenAverage);
  EXPECT_DOUBLE_EQ(per.at("a").performance_score, 0.5);
  EXPECT_DOUBLE_EQ(per.at("b").performance_score, 0.5);
  EXPECT_THROW(score_table({{"a", {1.0}}, {"b", {1.0, 2.0}}}, PsMode::AverageThenScore),
               std::invalid_argument);
}
