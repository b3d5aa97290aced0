#include "sol/loss.hpp"

#include <cmath>

#include "sol/error.hpp"

namespace sol {

std::string_view loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::kHinge: return "hinge";
    case LossKind::kLogistic: return "logistic";
    case LossKind::kSquare: return "square";
    case LossKind::kBool: return "bool";
    case LossKind::kMaxScoreHinge: return "maxscore_hinge";
  }
  return "hinge";
}

std::optional<LossKind> parse_loss(std::string_view name) {
  if (name == "hinge") return LossKind::kHinge;
  if (name == "logistic") return LossKind::kLogistic;
  if (name == "square") return LossKind::kSquare;
  if (name == "bool" || name == "bool_loss") return LossKind::kBool;
  if (name == "maxscore_hinge") return LossKind::kMaxScoreHinge;
  return std::nullopt;
}

LossValue loss_and_gradscale(LossKind kind, double margin) {
  switch (kind) {
    case LossKind::kHinge:
    case LossKind::kMaxScoreHinge: {
      const double loss = 1.0 - margin;
      if (loss > 0.0) return {loss, -1.0};
      return {0.0, 0.0};
    }
    case LossKind::kLogistic: {
      // ln(1 + e^-m) and -1/(1 + e^m), evaluated without overflow.
      double loss;
      double gscale;
      if (margin > 0.0) {
        const double e = std::exp(-margin);
        loss = std::log1p(e);
        gscale = -e / (1.0 + e);
      } else {
        const double e = std::exp(margin);
        loss = -margin + std::log1p(e);
        gscale = -1.0 / (1.0 + e);
      }
      return {loss, gscale};
    }
    case LossKind::kSquare: {
      const double r = 1.0 - margin;
      return {0.5 * r * r, margin - 1.0};
    }
    case LossKind::kBool:
      if (margin <= 0.0) return {1.0, -1.0};
      return {0.0, 0.0};
  }
  return {};
}

double l1_regularized_loss(double base_loss, std::span<const double> weights,
                           double lambda) {
  if (lambda < 0.0) throw ConfigError("lambda must be non-negative");
  if (lambda == 0.0) return base_loss;
  double norm = 0.0;
  for (double w : weights) norm += std::abs(w);
  return base_loss + lambda * norm;
}

}  // namespace sol
