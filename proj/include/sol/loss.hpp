#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace sol {

enum class LossKind { kHinge, kLogistic, kSquare, kBool, kMaxScoreHinge };

std::string_view loss_name(LossKind kind);
std::optional<LossKind> parse_loss(std::string_view name);

struct LossValue {
  double loss = 0.0;
  // Derivative of the loss with respect to the margin. The subgradient with
  // respect to a weight vector is gscale * y * x.
  double gscale = 0.0;
};

// margin = y * <w, x> for binary problems, or w_y.x - max_{r != y} w_r.x for
// multi-class max-score problems (where kMaxScoreHinge is plain hinge).
LossValue loss_and_gradscale(LossKind kind, double margin);

// base_loss + lambda * ||w||_1 summed over every weight vector. Diagnostic
// only; sparse learners apply lambda inside their updates.
double l1_regularized_loss(double base_loss, std::span<const double> weights,
                           double lambda);

}  // namespace sol
