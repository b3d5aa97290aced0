#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "reference_learners.hpp"
#include "sol/algorithm.hpp"
#include "sol/confidence.hpp"
#include "sol/error.hpp"
#include "sol/model.hpp"
#include "synthetic.hpp"

namespace sol {
namespace {

ModelState model(std::string_view algo, const std::string& params = "") {
  ModelConfig c;
  if (!params.empty()) c.params = HyperParams::parse(params, ',');
  return make_model(algo, c);
}

StepOutcome step(ModelState& m, int sign, SparseVector x) {
  return learn_one(m, {std::move(x), sign > 0 ? 1 : 0});
}

double w(ModelState m, std::size_t j) {
  flush(m);
  return m.weights[0].get(j);
}

double aux(const ModelState& m, const char* name, std::size_t j) {
  return m.aux_array(name).rows[0].get(j);
}

void expect_unchanged_except_t(ModelState before, const ModelState& after) {
  before.t = after.t;
  EXPECT_TRUE(before == after);
}

TEST(Sop, MistakeOnZeroScore) {
  auto m = model("sop", "a=1");
  EXPECT_TRUE(step(m, +1, SparseVector({1}, {2.0f})).updated);
  EXPECT_EQ(m.weights[0].get(1), 2.0);
  EXPECT_EQ(aux(m, "S", 1), 4.0);
}

TEST(Sop, SecondPresentationIsCorrect) {
  auto m = model("sop", "a=1");
  const SparseVector x({1}, {2.0f});
  step(m, +1, x);
  EXPECT_DOUBLE_EQ(predict(m, x).scores[0], 4.0 / 9.0);
  const auto before = m;
  EXPECT_FALSE(step(m, +1, x).updated);
  expect_unchanged_except_t(before, m);
}

TEST(Sop, CorrelationsNeverDecrease) {
  auto m = model("sop");
  auto prev = m.aux_array("S").rows[0];
  for (const auto& ex : testing::random_stream(1000, 20, 6, 5)) {
    learn_one(m, ex);
    const auto& cur = m.aux_array("S").rows[0];
    for (std::size_t j = 0; j <= 20; ++j) ASSERT_GE(cur.get(j), prev.get(j));
    prev = cur;
  }
}

TEST(Sop, RejectsNonPositiveA) { EXPECT_THROW(model("sop", "a=0"), ConfigError); }

TEST(Cw, SatisfiedConstraintIsPassive) {
  for (const char* algo : {"cw", "eccw"}) {
    auto m = model(algo);
    m.weights[0].at(1) = 1.0;
    const auto before = m;
    EXPECT_FALSE(step(m, +1, SparseVector({1}, {1.0f})).updated) << algo;
    expect_unchanged_except_t(before, m);
  }
}

TEST(Cw, FirstUpdateSatisfiesLinearizedConstraint) {
  auto m = model("cw");
  const SparseVector x({1}, {1.0f});
  EXPECT_TRUE(step(m, +1, x).updated);
  const double alpha = m.weights[0].get(1);  // mu' = alpha * Sigma * x
  EXPECT_GT(alpha, 0.0);
  EXPECT_NEAR(alpha, testing::numeric_cw_alpha(0.0, 1.0, kDefaultPhi), 1e-6);
  const double margin = predict(m, x).scores[0];
  const double variance = aux(m, "sigma", 1);
  EXPECT_GE(margin, kDefaultPhi * variance - 1e-8);
}

TEST(Eccw, FirstUpdateSatisfiesExactConstraint) {
  auto m = model("eccw");
  const SparseVector x({1}, {1.0f});
  EXPECT_TRUE(step(m, +1, x).updated);
  const double alpha = m.weights[0].get(1);
  EXPECT_GT(alpha, 0.0);
  EXPECT_NEAR(alpha, testing::numeric_eccw_alpha(0.0, 1.0, kDefaultPhi), 1e-6);
  const double margin = predict(m, x).scores[0];
  const double variance = aux(m, "sigma", 1);
  EXPECT_GE(margin, kDefaultPhi * std::sqrt(variance) - 1e-8);
  EXPECT_NEAR(variance, eccw_posterior_variance(alpha, 1.0, kDefaultPhi), 1e-12);
}

TEST(ConfidenceStep, ClosedFormsMatchNumericalProjection) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> um(-3.0, 1.0);
  std::uniform_real_distribution<double> uv(0.01, 5.0);
  for (const double phi : {0.1, kDefaultPhi, 1.0, 2.5}) {
    for (int i = 0; i < 200; ++i) {
      const double m = um(rng);
      const double v = uv(rng);
      EXPECT_NEAR(cw_step_size(m, v, phi), testing::numeric_cw_alpha(m, v, phi), 1e-6)
          << m << " " << v << " " << phi;
      EXPECT_NEAR(eccw_step_size(m, v, phi), testing::numeric_eccw_alpha(m, v, phi), 1e-6)
          << m << " " << v << " " << phi;
    }
  }
  EXPECT_EQ(cw_step_size(1.0, 1.0, 0.5), 0.0);
  EXPECT_EQ(eccw_step_size(0.5, 1.0, 0.5), 0.0);
}

TEST(Cw, VariancesPositiveAndNonIncreasing) {
  for (const char* algo : {"cw", "eccw", "arow"}) {
    auto m = model(algo);
    auto prev = m.aux_array("sigma").rows[0];
    for (const auto& ex : testing::random_stream(2000, 20, 6, 6)) {
      learn_one(m, ex);
      const auto& cur = m.aux_array("sigma").rows[0];
      for (std::size_t j = 0; j <= 20; ++j) {
        ASSERT_GT(cur.get(j), 0.0) << algo;
        ASSERT_LE(cur.get(j), prev.get(j)) << algo;
        ASSERT_LE(cur.get(j), 1.0) << algo;
      }
      prev = cur;
    }
  }
}

// With a large phi and label noise the variances shrink super-geometrically
// and reach the floor; the state must stay finite and positive.
TEST(Eccw, CollapsedVariancesStayFiniteAndPositive) {
  auto m = model("eccw", "phi=1.5");
  const auto data = testing::random_stream(3000, 32, 12, 1234);
  for (const auto& ex : data) learn_one(m, ex);
  const auto& sigma = m.aux_array("sigma").rows[0];
  double smallest = 1.0;
  for (std::size_t j = 1; j <= 32; ++j) {
    ASSERT_GT(sigma.get(j), 0.0);
    ASSERT_TRUE(std::isfinite(m.weights[0].get(j)));
    smallest = std::min(smallest, sigma.get(j));
  }
  EXPECT_LT(smallest, 1e-100);
}

TEST(Cw, RejectsNonPositivePhi) {
  EXPECT_THROW(model("cw", "phi=0"), ConfigError);
  EXPECT_THROW(model("eccw", "phi=-1"), ConfigError);
}

TEST(Arow, HandTrace) {
  auto m = model("arow", "r=1");
  step(m, +1, SparseVector({1}, {1.0f}));
  EXPECT_EQ(m.weights[0].get(1), 0.5);
  EXPECT_EQ(aux(m, "sigma", 1), 0.5);
}

TEST(Arow, UnitMarginIsPassive) {
  auto m = model("arow");
  m.weights[0].at(1) = 1.0;
  const auto before = m;
  EXPECT_FALSE(step(m, +1, SparseVector({1}, {1.0f})).updated);
  expect_unchanged_except_t(before, m);
}

TEST(Arow, RejectsNonPositiveR) { EXPECT_THROW(model("arow", "r=0"), ConfigError); }

TEST(AdaFobos, HandTrace) {
  auto m = model("ada-fobos", "eta=1,delta=1");
  step(m, +1, SparseVector({1}, {1.0f}));
  EXPECT_EQ(aux(m, "G", 1), 1.0);
  EXPECT_EQ(w(m, 1), 0.5);
}

TEST(AdaFobos, LargeLambdaGivesExactZero) {
  auto m = model("ada-fobos-l1", "lambda=10");
  step(m, +1, SparseVector({1, 2}, {1.0f, -0.5f}));
  EXPECT_EQ(w(m, 1), 0.0);
  EXPECT_EQ(w(m, 2), 0.0);
}

TEST(AdaFobos, SquaredGradientsNeverDecrease) {
  for (const char* algo : {"ada-fobos", "ada-fobos-l1", "ada-rda", "ada-rda-l1"}) {
    auto m = model(algo);
    auto prev = m.aux_array("G").rows[0];
    for (const auto& ex : testing::random_stream(1000, 20, 6, 7)) {
      learn_one(m, ex);
      const auto& cur = m.aux_array("G").rows[0];
      for (std::size_t j = 0; j <= 20; ++j) ASSERT_GE(cur.get(j), prev.get(j)) << algo;
      prev = cur;
    }
  }
}

TEST(AdaFobos, RejectsBadParameters) {
  EXPECT_THROW(model("ada-fobos", "eta=0"), ConfigError);
  EXPECT_THROW(model("ada-fobos", "delta=0"), ConfigError);
  EXPECT_THROW(model("ada-fobos-l1", "lambda=-1"), ConfigError);
  EXPECT_THROW(model("ada-fobos", "lambda=1"), ConfigError);
}

TEST(AdaRda, HandTrace) {
  auto m = model("ada-rda", "eta=1,delta=1");
  step(m, +1, SparseVector({1}, {1.0f}));
  EXPECT_EQ(w(m, 1), 0.5);
}

TEST(AdaRda, MeanGradientInsideThresholdIsZero) {
  auto m = model("ada-rda-l1", "lambda=0.6");
  step(m, +1, SparseVector({1}, {1.0f}));   // gbar_1 = -1
  step(m, +1, SparseVector({2}, {0.5f}));   // gbar_1 = -0.5, gbar_2 = -0.25
  EXPECT_EQ(w(m, 1), 0.0);
  EXPECT_EQ(w(m, 2), 0.0);
}

// One coordinate over 500 steps against a scalar recursion of the formula.
TEST(AdaRda, SingleCoordinateMatchesScalarRecursion) {
  for (const double lambda : {0.0, 0.05}) {
    auto m = model(lambda == 0.0 ? "ada-rda" : "ada-rda-l1",
                   lambda == 0.0 ? "eta=0.5,delta=0.1"
                                 : "eta=0.5,delta=0.1,lambda=" + std::to_string(lambda));
    double gsum = 0.0;
    double g2 = 0.0;
    double t = 0.0;
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 500; ++i) {
      const float value = static_cast<float>(u(rng));
      const int sign = (i % 3 == 0) ? -1 : 1;
      const SparseVector x({1}, {value});
      auto weight = [&] {
        if (t == 0.0) return 0.0;
        const double gbar = gsum / t;
        const double excess = std::abs(gbar) - lambda;
        if (excess <= 0.0) return 0.0;
        return -std::copysign(1.0, gbar) * 0.5 * t / (0.1 + std::sqrt(g2)) * excess;
      };
      const double margin = sign * weight() * value;
      t += 1.0;
      if (margin < 1.0) {
        const double g = -sign * double{value};
        gsum += g;
        g2 += g * g;
      }
      step(m, sign, x);
      ASSERT_NEAR(lazy_l1_scaffold(m, 0, x)[0], weight(), 1e-10) << i;
    }
  }
}

}  // namespace
}  // namespace sol
