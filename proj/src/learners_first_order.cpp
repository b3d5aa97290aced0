// First-order learners: Perceptron, OGD, PA / PA-I / PA-II, ALMA, RDA.

#include <array>
#include <cmath>

#include "learner_support.hpp"
#include "registry.hpp"

namespace sol {
namespace {

using detail::add_scaled;
using detail::require;

class Perceptron final : public Algorithm {
 public:
  std::string_view name() const override { return "perceptron"; }
  std::string_view description() const override { return "The Perceptron Algorithm"; }
  std::span<const ParamSpec> params() const override { return {}; }
  LossKind default_loss() const override { return LossKind::kBool; }
  bool loss_is_fixed() const override { return true; }

  bool update(ModelState& model, const SparseVector& x, std::span<const Target> targets,
              double margin) const override {
    if (margin > 0.0) return false;
    for (const auto& t : targets) add_scaled(model.weights[t.row], x, t.sign);
    return !x.empty();
  }
};

class Ogd final : public Algorithm {
 public:
  std::string_view name() const override { return "ogd"; }
  std::string_view description() const override { return "Online Gradient Descent"; }
  std::span<const ParamSpec> params() const override { return kParams; }

  void validate(const HyperParams& p) const override {
    require(p.get("eta") > 0.0, "ogd: eta must be positive");
    require(p.get("power_t") >= 0.0, "ogd: power_t must be non-negative");
  }

  bool update(ModelState& model, const SparseVector& x, std::span<const Target> targets,
              double margin) const override {
    const LossValue lv = loss_and_gradscale(model.loss_kind, margin);
    if (lv.loss <= 0.0 || lv.gscale == 0.0) return false;
    const double eta =
        detail::learning_rate(model.hyper.get("eta"), model.t, model.hyper.get("power_t"));
    for (const auto& t : targets) add_scaled(model.weights[t.row], x, -eta * lv.gscale * t.sign);
    return true;
  }

 private:
  static constexpr std::array<ParamSpec, 2> kParams{{
      {"eta", 1.0, "learning rate scale"},
      {"power_t", 0.5, "step decay: eta_t = eta / t^power_t (0 = constant)"},
  }};
};

enum class PaVariant { kPa, kPa1, kPa2 };

class PassiveAggressive final : public Algorithm {
 public:
  explicit PassiveAggressive(PaVariant variant) : variant_(variant) {}

  std::string_view name() const override {
    switch (variant_) {
      case PaVariant::kPa: return "pa";
      case PaVariant::kPa1: return "pa1";
      case PaVariant::kPa2: return "pa2";
    }
    return "pa";
  }
  std::string_view description() const override {
    switch (variant_) {
      case PaVariant::kPa: return "Passive Aggressive Algorithms";
      case PaVariant::kPa1: return "Passive Aggressive, PA-I (clamped step)";
      case PaVariant::kPa2: return "Passive Aggressive, PA-II (soft step)";
    }
    return "";
  }
  std::span<const ParamSpec> params() const override {
    if (variant_ == PaVariant::kPa) return {};
    return kParams;
  }
  bool loss_is_fixed() const override { return true; }

  void validate(const HyperParams& p) const override {
    if (variant_ != PaVariant::kPa) require(p.get("C") > 0.0, "pa1/pa2: C must be positive");
  }

  bool update(ModelState& model, const SparseVector& x, std::span<const Target> targets,
              double margin) const override {
    const double loss = 1.0 - margin;
    if (loss <= 0.0) return false;
    // Each target row moves along x, so the combined squared step norm scales
    // with the number of rows touched.
    const double q = x.squared_norm() * static_cast<double>(targets.size());
    if (q == 0.0) return false;
    double tau = 0.0;
    switch (variant_) {
      case PaVariant::kPa: tau = loss / q; break;
      case PaVariant::kPa1: tau = std::min(model.hyper.get("C"), loss / q); break;
      case PaVariant::kPa2: tau = loss / (q + 1.0 / (2.0 * model.hyper.get("C"))); break;
    }
    for (const auto& t : targets) add_scaled(model.weights[t.row], x, tau * t.sign);
    return true;
  }

 private:
  static constexpr std::array<ParamSpec, 1> kParams{{{"C", 1.0, "aggressiveness bound"}}};
  PaVariant variant_;
};

// ALMA with p = 2. Rows are stored as raw * scale so the projection back onto
// the unit ball is O(1); norm2 tracks ||raw * scale||^2 incrementally.
class Alma final : public Algorithm {
 public:
  std::string_view name() const override { return "alma"; }
  std::string_view description() const override { return "Approximate Large Margin Algorithm"; }
  std::span<const ParamSpec> params() const override { return kParams; }
  bool loss_is_fixed() const override { return true; }
  bool lazy() const override { return true; }
  bool flush_before_save() const override { return false; }

  void validate(const HyperParams& p) const override {
    const double alpha = p.get("alpha");
    require(alpha > 0.0 && alpha <= 1.0, "alma: alpha must lie in (0, 1]");
    require(p.get("C") > 0.0, "alma: C must be positive");
  }

  void init_state(ModelState& model) const override {
    model.add_scalar("k", 1.0);
    model.add_scalar("scale", 1.0);
    model.add_scalar("norm2", 0.0);
  }

  void effective_weights(const ModelState& model, std::size_t row, const SparseVector& x,
                         std::span<double> out) const override {
    const auto& w = model.weights[row];
    const double scale = model.scalar("scale")[row];
    const auto idx = x.indices();
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = w.get(idx[i]) * scale;
  }

  double score(const ModelState& model, std::size_t row, const SparseVector& x) const override {
    return dot(model.weights[row].view(), x) * model.scalar("scale")[row];
  }

  bool update(ModelState& model, const SparseVector& x, std::span<const Target> targets,
              double margin) const override {
    auto& k = model.scalar("k");
    const double alpha = model.hyper.get("alpha");
    const double kk = k[targets[0].row];
    const double threshold = (1.0 - alpha) * (1.0 / alpha) / std::sqrt(kk);
    if (margin > threshold) return false;
    const double eta = model.hyper.get("C") / std::sqrt(kk);
    auto& scale = model.scalar("scale");
    auto& norm2 = model.scalar("norm2");
    const double xx = x.squared_norm();
    for (const auto& t : targets) {
      const std::size_t r = t.row;
      const double wx = score(model, r, x);
      add_scaled(model.weights[r], x, eta * t.sign / scale[r]);
      norm2[r] += 2.0 * eta * t.sign * wx + eta * eta * xx;
      if (norm2[r] > 1.0) {
        scale[r] /= std::sqrt(norm2[r]);
        norm2[r] = 1.0;
      }
      if (scale[r] < 1e-8) rescale(model, r);
      k[r] += 1.0;
    }
    return true;
  }

  void flush(ModelState& model) const override {
    for (std::size_t r = 0; r < model.row_count(); ++r) rescale(model, r);
  }

 private:
  // Folds the scale into the stored row and recomputes the norm exactly.
  static void rescale(ModelState& model, std::size_t r) {
    double& scale = model.scalar("scale")[r];
    double sum = 0.0;
    for (double& v : model.weights[r].view()) {
      v *= scale;
      sum += v * v;
    }
    scale = 1.0;
    model.scalar("norm2")[r] = sum;
  }

  static constexpr std::array<ParamSpec, 2> kParams{{
      {"alpha", 1.0, "margin approximation factor in (0, 1]"},
      {"C", 1.4142135623730951, "step scale: eta_k = C / sqrt(k)"},
  }};
};

// Dual averaging without regularization: w = -(sqrt(t) / gamma) * gbar_t
// with gbar_t the mean subgradient over all t examples. Only the gradient sum
// is stored; weights are derived on demand.
class Rda final : public Algorithm {
 public:
  std::string_view name() const override { return "rda"; }
  std::string_view description() const override { return "Regularized Dual Averaging"; }
  std::span<const ParamSpec> params() const override { return kParams; }
  bool lazy() const override { return true; }

  void validate(const HyperParams& p) const override {
    require(p.get("gamma") > 0.0, "rda: gamma must be positive");
  }

  void init_state(ModelState& model) const override { model.add_aux("gsum", 0.0); }

  void effective_weights(const ModelState& model, std::size_t row, const SparseVector& x,
                         std::span<double> out) const override {
    const auto& gsum = model.aux_array("gsum").rows[row];
    const double c = coefficient(model);
    const auto idx = x.indices();
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = c * gsum.get(idx[i]);
  }

  bool update(ModelState& model, const SparseVector& x, std::span<const Target> targets,
              double margin) const override {
    const LossValue lv = loss_and_gradscale(model.loss_kind, margin);
    if (lv.gscale == 0.0) return false;
    auto& gsum = model.aux_array("gsum");
    for (const auto& t : targets) add_scaled(gsum.rows[t.row], x, lv.gscale * t.sign);
    return lv.loss > 0.0;
  }

  void flush(ModelState& model) const override {
    const double c = coefficient(model);
    const auto& gsum = model.aux_array("gsum");
    for (std::size_t r = 0; r < model.row_count(); ++r) {
      auto& w = model.weights[r];
      const auto g = gsum.rows[r].view();
      w.resize(g.size());
      auto data = w.view();
      for (std::size_t i = 0; i < g.size(); ++i) data[i] = c * g[i];
    }
  }

 private:
  // -(sqrt(t)/gamma) * (gsum/t) = -gsum / (gamma * sqrt(t))
  static double coefficient(const ModelState& model) {
    if (model.t == 0) return 0.0;
    return -1.0 / (model.hyper.get("gamma") * std::sqrt(static_cast<double>(model.t)));
  }

  static constexpr std::array<ParamSpec, 1> kParams{{{"gamma", 1.0, "proximal scale"}}};
};

}  // namespace

std::vector<const Algorithm*> first_order_learners() {
  static const Perceptron perceptron;
  static const Ogd ogd;
  static const PassiveAggressive pa(PaVariant::kPa);
  static const PassiveAggressive pa1(PaVariant::kPa1);
  static const PassiveAggressive pa2(PaVariant::kPa2);
  static const Alma alma;
  static const Rda rda;
  return {&perceptron, &ogd, &pa, &pa1, &pa2, &alma, &rda};
}

}  // namespace sol
