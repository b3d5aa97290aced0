#include <gtest/gtest.h>

#include <cmath>

#include "sol/error.hpp"
#include "sol/loss.hpp"

namespace sol {
namespace {

TEST(Hinge, AtZeroMargin) {
  const auto lv = loss_and_gradscale(LossKind::kHinge, 0.0);
  EXPECT_EQ(lv.loss, 1.0);
  EXPECT_EQ(lv.gscale, -1.0);
}

TEST(Hinge, BeyondUnitMargin) {
  const auto lv = loss_and_gradscale(LossKind::kHinge, 2.0);
  EXPECT_EQ(lv.loss, 0.0);
  EXPECT_EQ(lv.gscale, 0.0);
}

TEST(Hinge, GradientVanishesExactlyWhenLossDoes) {
  for (double m = -3.0; m <= 3.0; m += 0.0625) {
    for (const auto kind : {LossKind::kHinge, LossKind::kMaxScoreHinge}) {
      const auto lv = loss_and_gradscale(kind, m);
      EXPECT_EQ(lv.loss == 0.0, lv.gscale == 0.0) << m;
    }
  }
  EXPECT_EQ(loss_and_gradscale(LossKind::kHinge, 1.0).loss, 0.0);
}

TEST(Logistic, AtZeroMargin) {
  const auto lv = loss_and_gradscale(LossKind::kLogistic, 0.0);
  EXPECT_NEAR(lv.loss, std::log(2.0), 1e-15);
  EXPECT_NEAR(lv.gscale, -0.5, 1e-15);
}

TEST(Logistic, StableAtExtremeMargins) {
  const auto big = loss_and_gradscale(LossKind::kLogistic, 800.0);
  EXPECT_TRUE(std::isfinite(big.loss));
  EXPECT_GE(big.loss, 0.0);
  const auto small = loss_and_gradscale(LossKind::kLogistic, -800.0);
  EXPECT_NEAR(small.loss, 800.0, 1e-9);
  EXPECT_NEAR(small.gscale, -1.0, 1e-15);
}

TEST(Square, Values) {
  const auto lv = loss_and_gradscale(LossKind::kSquare, -1.0);
  EXPECT_EQ(lv.loss, 2.0);
  EXPECT_EQ(lv.gscale, -2.0);
}

TEST(Bool, MistakeDriven) {
  EXPECT_EQ(loss_and_gradscale(LossKind::kBool, 0.0).loss, 1.0);
  EXPECT_EQ(loss_and_gradscale(LossKind::kBool, 0.0).gscale, -1.0);
  EXPECT_EQ(loss_and_gradscale(LossKind::kBool, 1e-9).loss, 0.0);
  EXPECT_EQ(loss_and_gradscale(LossKind::kBool, 1e-9).gscale, 0.0);
}

// Central finite differences in the margin, relative tolerance 1e-6.
TEST(GradientCheck, LogisticAndSquareMatchFiniteDifferences) {
  constexpr double kStep = 1e-5;
  constexpr double kRelTol = 1e-6;
  for (const auto kind : {LossKind::kLogistic, LossKind::kSquare}) {
    for (double m = -5.0; m <= 5.0; m += 0.05) {
      if (kind == LossKind::kSquare && std::abs(m - 1.0) < 1e-3) continue;
      const double fd = (loss_and_gradscale(kind, m + kStep).loss -
                         loss_and_gradscale(kind, m - kStep).loss) /
                        (2 * kStep);
      const double g = loss_and_gradscale(kind, m).gscale;
      EXPECT_LE(std::abs(fd - g), kRelTol * std::max(1.0, std::abs(g)))
          << loss_name(kind) << " m=" << m;
    }
  }
}

TEST(L1RegularizedLoss, ZeroWeights) {
  const std::vector<double> w(5, 0.0);
  EXPECT_EQ(l1_regularized_loss(1.0, w, 0.5), 1.0);
}

TEST(L1RegularizedLoss, HandArithmetic) {
  const std::vector<double> w = {0.0, -2.0, 1.0};
  EXPECT_NEAR(l1_regularized_loss(0.0, w, 0.1), 0.3, 1e-15);
}

TEST(L1RegularizedLoss, ZeroLambdaIsIdentity) {
  const std::vector<double> w = {3.0, -2.0};
  EXPECT_EQ(l1_regularized_loss(0.7, w, 0.0), 0.7);
}

TEST(L1RegularizedLoss, NegativeLambdaRejected) {
  const std::vector<double> w = {1.0};
  EXPECT_THROW(l1_regularized_loss(0.0, w, -0.1), ConfigError);
}

TEST(LossNames, RoundTrip) {
  for (const auto kind : {LossKind::kHinge, LossKind::kLogistic, LossKind::kSquare,
                          LossKind::kBool, LossKind::kMaxScoreHinge}) {
    EXPECT_EQ(parse_loss(loss_name(kind)), kind);
  }
  EXPECT_EQ(parse_loss("bool_loss"), LossKind::kBool);
  EXPECT_FALSE(parse_loss("nope").has_value());
}

}  // namespace
}  // namespace sol
