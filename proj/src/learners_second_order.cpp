// Second-order learners with diagonal per-coordinate state: SOP, CW, ECCW,
// AROW and the adaptive-gradient family (Ada-FOBOS, Ada-RDA and their L1
// forms).

#include <array>
#include <cmath>
#include <limits>

#include "learner_support.hpp"
#include "registry.hpp"
#include "sol/confidence.hpp"

namespace sol {

namespace {

// Positive root of a*x^2 + b*x + c = 0 (a > 0, c < 0 or b < 0), evaluated
// without cancellation.
double positive_root(double a, double b, double c) {
  const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * a * c));
  if (b >= 0.0) return (-2.0 * c) / (b + disc);
  return (-b + disc) / (2.0 * a);
}

}  // namespace

double cw_step_size(double margin, double variance, double phi) {
  if (variance <= 0.0 || margin >= phi * variance) return 0.0;
  const double a = 2.0 * phi * variance * variance;
  const double b = variance * (1.0 + 2.0 * phi * margin);
  const double c = margin - phi * variance;
  return std::max(0.0, positive_root(a, b, c));
}

double eccw_step_size(double margin, double variance, double phi) {
  if (variance <= 0.0 || margin >= phi * std::sqrt(variance)) return 0.0;
  const double psi = 1.0 + phi * phi / 2.0;
  const double zeta = 1.0 + phi * phi;
  const double a = variance * variance * zeta;
  const double b = 2.0 * variance * margin * psi;
  const double c = margin * margin - variance * phi * phi;
  return std::max(0.0, positive_root(a, b, c));
}

double eccw_posterior_variance(double alpha, double variance, double phi) {
  const double avp = alpha * variance * phi;
  const double s = 2.0 * variance / (avp + std::sqrt(avp * avp + 4.0 * variance));
  return s * s;
}

namespace {

using detail::add_scaled;
using detail::require;

constexpr double kMinVariance = std::numeric_limits<double>::min();

double weighted_variance(const GrowableArray& sigma, const SparseVector& x) {
  const auto idx = x.indices();
  const auto val = x.values();
  double v = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double xi = val[i];
    v += sigma.get(idx[i]) * xi * xi;
  }
  return v;
}

// Diagonal second-order perceptron. Weights hold the mistake-driven sum u; the
// prediction whitens each coordinate by (a + S_i + x_i^2).
class SecondOrderPerceptron final : public Algorithm {
 public:
  std::string_view name() const override { return "sop"; }
  std::string_view description() const override { return "Second-Order Perceptron"; }
  std::span<const ParamSpec> params() const override { return kParams; }
  LossKind default_loss() const override { return LossKind::kBool; }
  bool loss_is_fixed() const override { return true; }

  void validate(const HyperParams& p) const override {
    require(p.get("a") > 0.0, "sop: a must be positive");
  }

  void init_state(ModelState& model) const override { model.add_aux("S", 0.0); }

  double score(const ModelState& model, std::size_t row, const SparseVector& x) const override {
    const auto& u = model.weights[row];
    const auto& s = model.aux_array("S").rows[row];
    const double a = model.hyper.get("a");
    const auto idx = x.indices();
    const auto val = x.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const double xi = val[i];
      sum += u.get(idx[i]) * xi / (a + s.get(idx[i]) + xi * xi);
    }
    return sum;
  }

  bool update(ModelState& model, const SparseVector& x, std::span<const Target> targets,
              double margin) const override {
    if (margin > 0.0 || x.empty()) return false;
    auto& s = model.aux_array("S");
    const auto idx = x.indices();
    const auto val = x.values();
    for (const auto& t : targets) {
      add_scaled(model.weights[t.row], x, t.sign);
      auto& row = s.rows[t.row];
      detail::cover(row, x);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const double xi = val[i];
        row.at(idx[i]) += xi * xi;
      }
    }
    return true;
  }

 private:
  static constexpr std::array<ParamSpec, 1> kParams{{{"a", 1.0, "regularization of the correlation matrix"}}};
};

enum class CwVariant { kCw, kEccw };

class ConfidenceWeighted final : public Algorithm {
 public:
  explicit ConfidenceWeighted(CwVariant variant) : variant_(variant) {}

  std::string_view name() const override { return variant_ == CwVariant::kCw ? "cw" : "eccw"; }
  std::string_view description() const override {
    return variant_ == CwVariant::kCw ? "Confidence Weighted Learning"
                                      : "Exactly Convex Confidence Weighted Learning";
  }
  std::span<const ParamSpec> params() const override { return kParams; }
  bool loss_is_fixed() const override { return true; }

  void validate(const HyperParams& p) const override {
    require(p.get("phi") > 0.0, "cw/eccw: phi must be positive");
  }

  void init_state(ModelState& model) const override { model.add_aux("sigma", 1.0); }

  bool update(ModelState& model, const SparseVector& x, std::span<const Target> targets,
              double margin) const override {
    auto& sigma = model.aux_array("sigma");
    double v = 0.0;
    for (const auto& t : targets) v += weighted_variance(sigma.rows[t.row], x);
    const double phi = model.hyper.get("phi");
    double alpha = 0.0;
    double precision_gain = 0.0;
    if (variant_ == CwVariant::kCw) {
      alpha = cw_step_size(margin, v, phi);
      precision_gain = 2.0 * alpha * phi;
    } else {
      alpha = eccw_step_size(margin, v, phi);
      if (alpha > 0.0) precision_gain = alpha * phi / std::sqrt(eccw_posterior_variance(alpha, v, phi));
    }
    if (alpha <= 0.0) return false;
    // Under label noise the variances collapse until the step overflows.
    if (!std::isfinite(alpha) || !std::isfinite(precision_gain)) return false;

    const auto idx = x.indices();
    const auto val = x.values();
    for (const auto& t : targets) {
      auto& mu = model.weights[t.row];
      auto& sig = sigma.rows[t.row];
      detail::cover(mu, x);
      detail::cover(sig, x);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const double xi = val[i];
        double& s = sig.at(idx[i]);
        mu.at(idx[i]) += alpha * t.sign * s * xi;
        s = std::max(1.0 / (1.0 / s + precision_gain * xi * xi), kMinVariance);
      }
    }
    return true;
  }

 private:
  static constexpr std::array<ParamSpec, 1> kParams{{{"phi", kDefaultPhi, "confidence quantile (0.5244 = 70%)"}}};
  CwVariant variant_;
};

class Arow final : public Algorithm {
 public:
  std::string_view name() const override { return "arow"; }
  std::string_view description() const override { return "Adaptive Regularized Online Learning"; }
  std::span<const ParamSpec> params() const override { return kParams; }
  bool loss_is_fixed() const override { return true; }

  void validate(const HyperParams& p) const override {
    require(p.get("r") > 0.0, "arow: r must be positive");
  }

  void init_state(ModelState& model) const override { model.add_aux("sigma", 1.0); }

  bool update(ModelState& model, const SparseVector& x, std::span<const Target> targets,
              double margin) const override {
    if (margin >= 1.0 || x.empty()) return false;
    auto& sigma = model.aux_array("sigma");
    double v = 0.0;
    for (const auto& t : targets) v += weighted_variance(sigma.rows[t.row], x);
    const double beta = 1.0 / (v + model.hyper.get("r"));
    const double alpha = beta * (1.0 - margin);
    const auto idx = x.indices();
    const auto val = x.values();
    for (const auto& t : targets) {
      auto& mu = model.weights[t.row];
      auto& sig = sigma.rows[t.row];
      detail::cover(mu, x);
      detail::cover(sig, x);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const double xi = val[i];
        double& s = sig.at(idx[i]);
        mu.at(idx[i]) += alpha * t.sign * s * xi;
        s -= beta * s * s * xi * xi;
      }
    }
    return true;
  }

 private:
  static constexpr std::array<ParamSpec, 1> kParams{{{"r", 1.0, "confidence regularizer"}}};
};

constexpr std::array<ParamSpec, 2> kAdaParams{{
    {"eta", 1.0, "learning rate"},
    {"delta", 1.0, "denominator offset: H = delta + sqrt(G)"},
}};
constexpr std::array<ParamSpec, 3> kAdaL1Params{{
    {"eta", 1.0, "learning rate"},
    {"delta", 1.0, "denominator offset: H = delta + sqrt(G)"},
    {"lambda", 1e-4, "L1 penalty"},
}};

void validate_ada(const HyperParams& p) {
  require(p.get("eta") > 0.0, "ada: eta must be positive");
  require(p.get("delta") > 0.0, "ada: delta must be positive");
  require(p.get_or("lambda", 0.0) >= 0.0, "ada: lambda must be non-negative");
}

// Composite-mirror-descent AdaGrad: gradient step scaled by 1/H_i then soft
// threshold eta*lambda/H_i. With lambda > 0 untouched coordinates owe one
// threshold per elapsed step; "stamp" records the step each coordinate was
// last brought current.
class AdaFobos final : public Algorithm {
 public:
  explicit AdaFobos(bool l1) : l1_(l1) {}

  std::string_view name() const override { return l1_ ? "ada-fobos-l1" : "ada-fobos"; }
  std::string_view description() const override {
    return l1_ ? "Ada-FOBOS with l1 regularization" : "Adaptive Gradient Descent";
  }
  std::span<const ParamSpec> params() const override {
    if (l1_) return kAdaL1Params;
    return kAdaParams;
  }
  bool lazy() const override { return l1_; }

  void validate(const HyperParams& p) const override { validate_ada(p); }

  void init_state(ModelState& model) const override {
    model.add_aux("G", 0.0);
    if (l1_) model.add_aux("stamp", 0.0, false);
  }

  void after_load(ModelState& model) const override {
    if (!l1_) return;
    auto& stamp = model.aux_array("stamp");
    for (std::size_t r = 0; r < model.row_count(); ++r) {
      stamp.rows[r].resize(model.weights[r].size());
      for (double& s : stamp.rows[r].view()) s = static_cast<double>(model.t);
    }
  }

  void effective_weights(const ModelState& model, std::size_t row, const SparseVector& x,
                         std::span<double> out) const override {
    const auto& w = model.weights[row];
    const auto idx = x.indices();
    if (!l1_) {
      for (std::size_t i = 0; i < idx.size(); ++i) out[i] = w.get(idx[i]);
      return;
    }
    const auto& g2 = model.aux_array("G").rows[row];
    const auto& stamp = model.aux_array("stamp").rows[row];
    const double step_shrink = model.hyper.get("eta") * model.hyper.get("lambda");
    const double now = static_cast<double>(model.t);
    const double delta = model.hyper.get("delta");
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const double wi = w.get(idx[i]);
      if (wi == 0.0) {
        out[i] = 0.0;
        continue;
      }
      const double h = delta + std::sqrt(g2.get(idx[i]));
      out[i] = soft_threshold(wi, (now - stamp.get(idx[i])) * step_shrink / h);
    }
  }

  bool update(ModelState& model, const SparseVector& x, std::span<const Target> targets,
              double margin) const override {
    const LossValue lv = loss_and_gradscale(model.loss_kind, margin);
    if (lv.gscale == 0.0 || x.empty()) return false;
    const double eta = model.hyper.get("eta");
    const double delta = model.hyper.get("delta");
    const double lambda = l1_ ? model.hyper.get("lambda") : 0.0;
    const double step_shrink = eta * lambda;
    const double now = static_cast<double>(model.t);
    const double prev = now - 1.0;
    auto& g2 = model.aux_array("G");
    AuxArray* stamp = l1_ ? &model.aux_array("stamp") : nullptr;
    const auto idx = x.indices();
    const auto val = x.values();
    for (const auto& t : targets) {
      auto& w = model.weights[t.row];
      auto& gr = g2.rows[t.row];
      detail::cover(w, x);
      detail::cover(gr, x);
      if (stamp) detail::cover(stamp->rows[t.row], x);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const std::size_t j = idx[i];
        double& wj = w.at(j);
        double& gj = gr.at(j);
        if (stamp) {
          double& sj = stamp->rows[t.row].at(j);
          if (wj != 0.0) wj = soft_threshold(wj, (prev - sj) * step_shrink / (delta + std::sqrt(gj)));
          sj = now;
        }
        const double g = lv.gscale * t.sign * double{val[i]};
        gj += g * g;
        const double h = delta + std::sqrt(gj);
        wj -= eta * g / h;
        if (lambda > 0.0) wj = soft_threshold(wj, step_shrink / h);
      }
    }
    return lv.loss > 0.0;
  }

  void flush(ModelState& model) const override {
    if (!l1_) return;
    const double eta = model.hyper.get("eta");
    const double delta = model.hyper.get("delta");
    const double step_shrink = eta * model.hyper.get("lambda");
    const double now = static_cast<double>(model.t);
    auto& g2 = model.aux_array("G");
    auto& stamp = model.aux_array("stamp");
    for (std::size_t r = 0; r < model.row_count(); ++r) {
      auto w = model.weights[r].view();
      auto& st = stamp.rows[r];
      st.resize(w.size());
      for (std::size_t j = 0; j < w.size(); ++j) {
        if (w[j] != 0.0) {
          w[j] = soft_threshold(w[j], (now - st.get(j)) * step_shrink /
                                          (delta + std::sqrt(g2.rows[r].get(j))));
        }
        st.at(j) = now;
      }
    }
  }

 private:
  bool l1_;
};

// Adaptive dual averaging: w_i = -sign(gbar_i) (eta t / H_i) max(0, |gbar_i| - lambda)
// from the gradient sum and squared-gradient sum; weights are derived on demand.
class AdaRda final : public Algorithm {
 public:
  explicit AdaRda(bool l1) : l1_(l1) {}

  std::string_view name() const override { return l1_ ? "ada-rda-l1" : "ada-rda"; }
  std::string_view description() const override {
    return l1_ ? "Ada-RDA with l1 regularization" : "Adaptive Regularized Dual Averaging";
  }
  std::span<const ParamSpec> params() const override {
    if (l1_) return kAdaL1Params;
    return kAdaParams;
  }
  bool lazy() const override { return true; }

  void validate(const HyperParams& p) const override { validate_ada(p); }

  void init_state(ModelState& model) const override {
    model.add_aux("gsum", 0.0);
    model.add_aux("G", 0.0);
  }

  void effective_weights(const ModelState& model, std::size_t row, const SparseVector& x,
                         std::span<double> out) const override {
    const auto& gsum = model.aux_array("gsum").rows[row];
    const auto& g2 = model.aux_array("G").rows[row];
    const auto idx = x.indices();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out[i] = weight(model, gsum.get(idx[i]), g2.get(idx[i]));
    }
  }

  bool update(ModelState& model, const SparseVector& x, std::span<const Target> targets,
              double margin) const override {
    const LossValue lv = loss_and_gradscale(model.loss_kind, margin);
    if (lv.gscale == 0.0 || x.empty()) return false;
    auto& gsum = model.aux_array("gsum");
    auto& g2 = model.aux_array("G");
    const auto idx = x.indices();
    const auto val = x.values();
    for (const auto& t : targets) {
      auto& gs = gsum.rows[t.row];
      auto& gq = g2.rows[t.row];
      detail::cover(gs, x);
      detail::cover(gq, x);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const double g = lv.gscale * t.sign * double{val[i]};
        gs.at(idx[i]) += g;
        gq.at(idx[i]) += g * g;
      }
    }
    return lv.loss > 0.0;
  }

  void flush(ModelState& model) const override {
    const auto& gsum = model.aux_array("gsum");
    const auto& g2 = model.aux_array("G");
    for (std::size_t r = 0; r < model.row_count(); ++r) {
      const auto gs = gsum.rows[r].view();
      auto& w = model.weights[r];
      w.resize(gs.size());
      auto data = w.view();
      for (std::size_t j = 0; j < gs.size(); ++j) data[j] = weight(model, gs[j], g2.rows[r].get(j));
    }
  }

 private:
  double weight(const ModelState& model, double gsum, double g2) const {
    if (model.t == 0 || gsum == 0.0) return 0.0;
    const double t = static_cast<double>(model.t);
    const double gbar = gsum / t;
    const double lambda = l1_ ? model.hyper.get("lambda") : 0.0;
    const double excess = std::abs(gbar) - lambda;
    if (excess <= 0.0) return 0.0;
    const double h = model.hyper.get("delta") + std::sqrt(g2);
    return -std::copysign(model.hyper.get("eta") * t / h * excess, gbar);
  }

  bool l1_;
};

}  // namespace

std::vector<const Algorithm*> second_order_learners() {
  static const SecondOrderPerceptron sop;
  static const ConfidenceWeighted cw(CwVariant::kCw);
  static const ConfidenceWeighted eccw(CwVariant::kEccw);
  static const Arow arow;
  static const AdaFobos ada_fobos(false);
  static const AdaRda ada_rda(false);
  return {&sop, &cw, &eccw, &arow, &ada_fobos, &ada_rda};
}

// The L1 forms are registered with the sparse learners.
std::vector<const Algorithm*> adaptive_l1_learners() {
  static const AdaFobos ada_fobos_l1(true);
  static const AdaRda ada_rda_l1(true);
  return {&ada_fobos_l1, &ada_rda_l1};
}

}  // namespace sol
