#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "tebc/core.hpp"
#include "tebc/random.hpp"

using namespace tebc;

namespace {

Distribution dist(std::vector<double> p) { return Distribution(std::move(p)); }

}  // namespace

TEST(Distribution, RejectsMalformedInput) {
  EXPECT_THROW(dist({1.0}), std::invalid_argument);
  EXPECT_THROW(dist({0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(dist({1.5, -0.5}), std::invalid_argument);
  EXPECT_THROW(dist({std::nan(""), 1.0}), std::invalid_argument);
  EXPECT_NO_THROW(dist({0.3, 0.7}));
}

TEST(Distribution, NormalizeIsExplicitAndExact) {
  const auto d = Distribution::normalize({1.0, 1.0, 1.0});
  double s = 0.0;
  for (double p : d.probs()) s += p;
  EXPECT_NEAR(s, 1.0, 1e-15);
  EXPECT_THROW(Distribution::normalize({0.0, 0.0}), std::invalid_argument);
}

TEST(CountSample, ToDistributionTimesNGivesCounts) {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::int64_t> c(7);
    for (auto& x : c) x = static_cast<std::int64_t>(rng() % 40);
    c[0] += 1;
    const CountSample s(c);
    const auto d = s.to_distribution();
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_EQ(std::llround(d[i] * static_cast<double>(s.n())), c[i]);
    }
  }
  EXPECT_THROW(CountSample({0, 0}), std::invalid_argument);
  EXPECT_THROW(CountSample({-1, 3}), std::invalid_argument);
}

TEST(Tsallis, WorkedValues) {
  EXPECT_DOUBLE_EQ(tsallis_entropy(Distribution::uniform(2)), 0.5);
  EXPECT_DOUBLE_EQ(tsallis_entropy(dist({1.0, 0.0, 0.0})), 0.0);
  EXPECT_NEAR(tsallis_entropy(dist({0.3, 0.7})), 0.42, 1e-15);
}

TEST(Tsallis, BoundedAndMaximalAtUniform) {
  Rng rng(3);
  for (std::size_t m : {2u, 5u, 40u}) {
    const double cap = 1.0 - 1.0 / static_cast<double>(m);
    EXPECT_NEAR(tsallis_entropy(Distribution::uniform(m)), cap, 1e-15);
    for (int t = 0; t < 200; ++t) {
      const double v = tsallis_entropy(draw_uniform_simplex(m, rng));
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, cap + 1e-15);
    }
  }
}

TEST(Shannon, WorkedValues) {
  EXPECT_NEAR(shannon_entropy(Distribution::uniform(2)), std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(shannon_entropy(dist({0.0, 1.0})), 0.0);
  // Direct summation: -(0.25 ln 0.25 + 0.75 ln 0.75).
  const double oracle = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
  EXPECT_NEAR(shannon_entropy(dist({0.25, 0.75})), oracle, 1e-15);
  EXPECT_NEAR(oracle, 0.5623, 5e-5);
}

TEST(Kl, WorkedValues) {
  const auto p = dist({0.2, 0.8});
  EXPECT_DOUBLE_EQ(kl_divergence(p, p), 0.0);
  EXPECT_NEAR(kl_divergence(dist({1.0, 0.0}), Distribution::uniform(2)), std::log(2.0), 1e-15);
  EXPECT_EQ(kl_divergence(dist({1.0, 0.0}), dist({0.0, 1.0})), std::numeric_limits<double>::infinity());
  EXPECT_THROW(kl_divergence(p, Distribution::uniform(3)), std::invalid_argument);
}

TEST(Kl, GibbsInequality) {
  Rng rng(5);
  for (int t = 0; t < 300; ++t) {
    const auto p = draw_uniform_simplex(6, rng);
    const auto q = draw_uniform_simplex(6, rng);
    EXPECT_GT(kl_divergence(p, q), 0.0);
  }
}

TEST(Jsd, WorkedValues) {
  const auto p = dist({0.1, 0.2, 0.7});
  EXPECT_DOUBLE_EQ(js_divergence(p, p), 0.0);
  EXPECT_NEAR(js_divergence(dist({1.0, 0.0}), dist({0.0, 1.0})), std::log(2.0), 1e-15);
  EXPECT_THROW(js_divergence(p, Distribution::uniform(2)), std::invalid_argument);
}

TEST(Jsd, SymmetricBoundedAndMatchesKlDefinition) {
  Rng rng(9);
  for (int t = 0; t < 300; ++t) {
    const auto p = draw_uniform_simplex(5, rng);
    const auto q = draw_uniform_simplex(5, rng);
    const double a = js_divergence(p, q);
    EXPECT_DOUBLE_EQ(a, js_divergence(q, p));
    EXPECT_GT(a, 0.0);
    EXPECT_LE(a, std::log(2.0));
    std::vector<double> mid(5);
    for (std::size_t i = 0; i < 5; ++i) mid[i] = 0.5 * (p[i] + q[i]);
    const auto md = Distribution::normalize(mid);
    EXPECT_NEAR(a, 0.5 * kl_divergence(p, md) + 0.5 * kl_divergence(q, md), 1e-13);
  }
}

TEST(Random, DeriveSeedSeparatesStreams) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
}

TEST(Random, MultinomialSumsToNAndRespectsSupport) {
  Rng rng(17);
  const auto p = dist({0.0, 0.25, 0.0, 0.75});
  for (int t = 0; t < 100; ++t) {
    const auto s = draw_multinomial(p, 37, rng);
    EXPECT_EQ(s.n(), 37);
    EXPECT_EQ(s[0], 0);
    EXPECT_EQ(s[2], 0);
  }
}

TEST(Random, UniformSimplexMarginalMean) {
  // Flat Dirichlet: E[p_1] = 1/m, Var[p_1] = (m-1)/(m^2 (m+1)).
  Rng rng(23);
  const std::size_t m = 4;
  const int draws = 40000;
  double s = 0.0;
  for (int t = 0; t < draws; ++t) s += draw_uniform_simplex(m, rng)[0];
  const double var = 3.0 / (16.0 * 5.0);
  EXPECT_NEAR(s / draws, 0.25, 4.0 * std::sqrt(var / draws));
}
