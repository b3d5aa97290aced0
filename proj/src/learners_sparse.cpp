// Sparsity-inducing first-order learners: truncated gradient (STG), FOBOS-L1,
// RDA-L1 and enhanced RDA-L1. The adaptive L1 learners are defined with the
// other adaptive-gradient learners and listed here.

#include <array>
#include <cmath>
#include <limits>

#include "learner_support.hpp"
#include "registry.hpp"

namespace sol {
namespace {

using detail::require;

// Gradient step followed by a per-step shrink toward zero. Every coordinate
// owes the shrink of every step, so the learner keeps the running total of
// all shrink amounts ("shrink_total") and each coordinate remembers the total
// at the time it was last brought current ("stamp"). Repeated truncations of
// a coordinate with no gradient compose into a single truncation by the sum.
class TruncatedGradient : public Algorithm {
 public:
  bool lazy() const override { return true; }

  void init_state(ModelState& model) const override {
    model.add_aux("stamp", 0.0, false);
    model.add_scalar("shrink_total", 0.0, 1);
  }

  void after_load(ModelState& model) const override {
    const double total = model.scalar("shrink_total")[0];
    auto& stamp = model.aux_array("stamp");
    for (std::size_t r = 0; r < model.row_count(); ++r) {
      stamp.rows[r].resize(model.weights[r].size());
      for (double& s : stamp.rows[r].view()) s = total;
    }
  }

  void effective_weights(const ModelState& model, std::size_t row, const SparseVector& x,
                         std::span<double> out) const override {
    const auto& w = model.weights[row];
    const auto& stamp = model.aux_array("stamp").rows[row];
    const double total = model.scalar("shrink_total")[0];
    const double theta = threshold(model);
    const auto idx = x.indices();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out[i] = truncate(w.get(idx[i]), total - stamp.get(idx[i]), theta);
    }
  }

  bool update(ModelState& model, const SparseVector& x, std::span<const Target> targets,
              double margin) const override {
    const LossValue lv = loss_and_gradscale(model.loss_kind, margin);
    if (lv.gscale == 0.0 || x.empty()) return false;
    const double eta = step_size(model);
    const double shrink = shrink_at(model);
    const double total = model.scalar("shrink_total")[0];
    const double theta = threshold(model);
    auto& stamp = model.aux_array("stamp");
    const auto idx = x.indices();
    const auto val = x.values();
    for (const auto& t : targets) {
      auto& w = model.weights[t.row];
      auto& st = stamp.rows[t.row];
      detail::cover(w, x);
      detail::cover(st, x);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        double& wj = w.at(idx[i]);
        double& sj = st.at(idx[i]);
        wj = truncate(wj, total - sj, theta);
        wj -= eta * lv.gscale * t.sign * double{val[i]};
        wj = truncate(wj, shrink, theta);
        sj = total + shrink;
      }
    }
    return lv.loss > 0.0;
  }

  void end_step(ModelState& model) const override {
    model.scalar("shrink_total")[0] += shrink_at(model);
  }

  void flush(ModelState& model) const override {
    const double total = model.scalar("shrink_total")[0];
    const double theta = threshold(model);
    auto& stamp = model.aux_array("stamp");
    for (std::size_t r = 0; r < model.row_count(); ++r) {
      auto w = model.weights[r].view();
      auto& st = stamp.rows[r];
      st.resize(w.size());
      for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] = truncate(w[j], total - st.get(j), theta);
        st.at(j) = total;
      }
    }
  }

 protected:
  static double step_size(const ModelState& model) {
    return detail::learning_rate(model.hyper.get("eta"), model.t, model.hyper.get("power_t"));
  }

  // Shrink applied at step model.t.
  virtual double shrink_at(const ModelState& model) const = 0;
  virtual double threshold(const ModelState& model) const = 0;

  // Coordinates with |w| > theta are left alone; the rest move toward zero
  // by amount without crossing it.
  static double truncate(double w, double amount, double theta) {
    if (w == 0.0 || std::abs(w) > theta) return w;
    return soft_threshold(w, amount);
  }
};

class Stg final : public TruncatedGradient {
 public:
  std::string_view name() const override { return "stg"; }
  std::string_view description() const override {
    return "Sparse Online Learning via Truncated Gradient";
  }
  std::span<const ParamSpec> params() const override { return kParams; }

  void validate(const HyperParams& p) const override {
    require(p.get("eta") > 0.0, "stg: eta must be positive");
    require(p.get("power_t") >= 0.0, "stg: power_t must be non-negative");
    require(p.get("lambda") >= 0.0, "stg: lambda (gravity) must be non-negative");
    const double k = p.get("K");
    require(k >= 1.0 && std::floor(k) == k, "stg: K must be an integer >= 1");
    require(p.get("theta") > 0.0, "stg: theta must be positive");
  }

 protected:
  double shrink_at(const ModelState& model) const override {
    const auto period = static_cast<std::uint64_t>(model.hyper.get("K"));
    if (model.t == 0 || model.t % period != 0) return 0.0;
    return step_size(model) * model.hyper.get("lambda") * static_cast<double>(period);
  }
  double threshold(const ModelState& model) const override { return model.hyper.get("theta"); }

 private:
  static constexpr std::array<ParamSpec, 5> kParams{{
      {"eta", 1.0, "learning rate scale"},
      {"power_t", 0.5, "step decay: eta_t = eta / t^power_t"},
      {"lambda", 1e-4, "gravity (truncation rate)"},
      {"K", 10.0, "truncation period in steps"},
      {"theta", std::numeric_limits<double>::infinity(), "truncate only weights with |w| <= theta"},
  }};
};

class FobosL1 final : public TruncatedGradient {
 public:
  std::string_view name() const override { return "fobos-l1"; }
  std::string_view description() const override {
    return "l1 Regularized Forward Backward Splitting";
  }
  std::span<const ParamSpec> params() const override { return kParams; }

  void validate(const HyperParams& p) const override {
    require(p.get("eta") > 0.0, "fobos-l1: eta must be positive");
    require(p.get("power_t") >= 0.0, "fobos-l1: power_t must be non-negative");
    require(p.get("lambda") >= 0.0, "fobos-l1: lambda must be non-negative");
  }

 protected:
  double shrink_at(const ModelState& model) const override {
    if (model.t == 0) return 0.0;
    return step_size(model) * model.hyper.get("lambda");
  }
  double threshold(const ModelState&) const override {
    return std::numeric_limits<double>::infinity();
  }

 private:
  static constexpr std::array<ParamSpec, 3> kParams{{
      {"eta", 1.0, "learning rate scale"},
      {"power_t", 0.5, "step decay: eta_t = eta / t^power_t"},
      {"lambda", 1e-4, "L1 penalty"},
  }};
};

// Dual averaging with an L1 term: a coordinate is nonzero only while its mean
// gradient exceeds the threshold lambda (+ gamma * rho / sqrt(t) when enhanced).
class RdaL1 final : public Algorithm {
 public:
  explicit RdaL1(bool enhanced) : enhanced_(enhanced) {}

  std::string_view name() const override { return enhanced_ ? "erda-l1" : "rda-l1"; }
  std::string_view description() const override {
    return enhanced_ ? "Enhanced l1/l2^2 Regularized Dual Averaging"
                     : "Mixed l1/l2^2 Regularized Dual Averaging";
  }
  std::span<const ParamSpec> params() const override {
    if (enhanced_) return kEnhancedParams;
    return kParams;
  }
  bool lazy() const override { return true; }

  void validate(const HyperParams& p) const override {
    require(p.get("gamma") > 0.0, "rda-l1: gamma must be positive");
    require(p.get("lambda") >= 0.0, "rda-l1: lambda must be non-negative");
    require(p.get_or("rho", 0.0) >= 0.0, "erda-l1: rho must be non-negative");
  }

  void init_state(ModelState& model) const override { model.add_aux("gsum", 0.0); }

  void effective_weights(const ModelState& model, std::size_t row, const SparseVector& x,
                         std::span<double> out) const override {
    const auto& gsum = model.aux_array("gsum").rows[row];
    const Rule rule = rule_for(model);
    const auto idx = x.indices();
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = rule(gsum.get(idx[i]));
  }

  bool update(ModelState& model, const SparseVector& x, std::span<const Target> targets,
              double margin) const override {
    const LossValue lv = loss_and_gradscale(model.loss_kind, margin);
    if (lv.gscale == 0.0) return false;
    auto& gsum = model.aux_array("gsum");
    for (const auto& t : targets) detail::add_scaled(gsum.rows[t.row], x, lv.gscale * t.sign);
    return lv.loss > 0.0;
  }

  void flush(ModelState& model) const override {
    const Rule rule = rule_for(model);
    const auto& gsum = model.aux_array("gsum");
    for (std::size_t r = 0; r < model.row_count(); ++r) {
      const auto gs = gsum.rows[r].view();
      auto& w = model.weights[r];
      w.resize(gs.size());
      auto data = w.view();
      for (std::size_t j = 0; j < gs.size(); ++j) data[j] = rule(gs[j]);
    }
  }

 private:
  struct Rule {
    double t = 0.0;
    double threshold = 0.0;
    double scale = 0.0;  // sqrt(t) / gamma

    double operator()(double gsum) const {
      if (t == 0.0) return 0.0;
      const double gbar = gsum / t;
      if (std::abs(gbar) <= threshold) return 0.0;
      return -scale * (gbar - std::copysign(threshold, gbar));
    }
  };

  Rule rule_for(const ModelState& model) const {
    Rule rule;
    if (model.t == 0) return rule;
    rule.t = static_cast<double>(model.t);
    const double gamma = model.hyper.get("gamma");
    const double root_t = std::sqrt(rule.t);
    rule.threshold = model.hyper.get("lambda");
    if (enhanced_) rule.threshold += gamma * model.hyper.get("rho") / root_t;
    rule.scale = root_t / gamma;
    return rule;
  }

  static constexpr std::array<ParamSpec, 2> kParams{{
      {"gamma", 1.0, "proximal scale"},
      {"lambda", 1e-4, "L1 threshold on the mean gradient"},
  }};
  static constexpr std::array<ParamSpec, 3> kEnhancedParams{{
      {"gamma", 1.0, "proximal scale"},
      {"lambda", 1e-4, "L1 threshold on the mean gradient"},
      {"rho", 0.005, "extra threshold gamma * rho / sqrt(t)"},
  }};

  bool enhanced_;
};

}  // namespace

std::vector<const Algorithm*> sparse_learners() {
  static const Stg stg;
  static const FobosL1 fobos_l1;
  static const RdaL1 rda_l1(false);
  static const RdaL1 erda_l1(true);
  std::vector<const Algorithm*> out = {&stg, &fobos_l1, &rda_l1, &erda_l1};
  for (const auto* a : adaptive_l1_learners()) out.push_back(a);
  return out;
}

}  // namespace sol
