#include "reference_learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sol::testing {
namespace {

double dense_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double hinge(double margin) { return std::max(0.0, 1.0 - margin); }

double sgn(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

double shrink(double v, double amount) { return sgn(v) * std::max(0.0, std::abs(v) - amount); }

bool touched(double xi) { return xi != 0.0; }

class Perceptron : public ReferenceLearner {
 public:
  explicit Perceptron(std::size_t d) : ReferenceLearner(d) {}
  void step(const std::vector<double>& x, double y) override {
    t_ += 1;
    if (y * score(x) <= 0) {
      for (std::size_t i = 0; i < x.size(); ++i) w_[i] += y * x[i];
    }
  }
};

class Ogd : public ReferenceLearner {
 public:
  Ogd(std::size_t d, const HyperParams& p)
      : ReferenceLearner(d), eta_(p.get("eta")), power_(p.get("power_t")) {}
  void step(const std::vector<double>& x, double y) override {
    t_ += 1;
    if (hinge(y * score(x)) > 0) {
      const double eta = eta_ / std::pow(t_, power_);
      for (std::size_t i = 0; i < x.size(); ++i) w_[i] += eta * y * x[i];
    }
  }

 private:
  double eta_, power_;
};

class Pa : public ReferenceLearner {
 public:
  Pa(std::size_t d, int variant, const HyperParams& p)
      : ReferenceLearner(d), variant_(variant), c_(p.get_or("C", 1.0)) {}
  void step(const std::vector<double>& x, double y) override {
    t_ += 1;
    const double loss = hinge(y * score(x));
    const double q = dense_dot(x, x);
    if (loss <= 0 || q == 0) return;
    double tau = loss / q;
    if (variant_ == 1) tau = std::min(c_, loss / q);
    if (variant_ == 2) tau = loss / (q + 1 / (2 * c_));
    for (std::size_t i = 0; i < x.size(); ++i) w_[i] += tau * y * x[i];
  }

 private:
  int variant_;
  double c_;
};

class Alma : public ReferenceLearner {
 public:
  Alma(std::size_t d, const HyperParams& p)
      : ReferenceLearner(d), alpha_(p.get("alpha")), c_(p.get("C")) {}
  void step(const std::vector<double>& x, double y) override {
    t_ += 1;
    const double b = 1 / alpha_;
    const double gamma_k = b * std::sqrt(1 / k_);
    if (y * score(x) > (1 - alpha_) * gamma_k) return;
    const double eta = c_ / std::sqrt(k_);
    for (std::size_t i = 0; i < x.size(); ++i) w_[i] += eta * y * x[i];
    const double norm = std::sqrt(dense_dot(w_, w_));
    if (norm > 1) {
      for (double& v : w_) v /= norm;
    }
    k_ += 1;
  }

 private:
  double alpha_, c_;
  double k_ = 1;
};

class Rda : public ReferenceLearner {
 public:
  Rda(std::size_t d, const HyperParams& p, bool l1, bool enhanced)
      : ReferenceLearner(d),
        gamma_(p.get("gamma")),
        lambda_(l1 ? p.get("lambda") : 0.0),
        rho_(enhanced ? p.get("rho") : 0.0),
        gbar_(d + 1, 0.0) {}
  void step(const std::vector<double>& x, double y) override {
    t_ += 1;
    const bool active = hinge(y * score(x)) > 0;
    // Running mean of subgradients g_t = -y x (zero when passive).
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double g = active ? -y * x[i] : 0.0;
      gbar_[i] = ((t_ - 1) * gbar_[i] + g) / t_;
    }
    const double threshold = lambda_ + gamma_ * rho_ / std::sqrt(t_);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::abs(gbar_[i]) <= threshold) {
        w_[i] = 0;
      } else {
        w_[i] = -(std::sqrt(t_) / gamma_) * (gbar_[i] - threshold * sgn(gbar_[i]));
      }
    }
  }
  std::vector<double> aux(std::string_view name) const override {
    if (name != "gsum") return {};
    std::vector<double> out(gbar_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = gbar_[i] * t_;
    return out;
  }

 private:
  double gamma_, lambda_, rho_;
  std::vector<double> gbar_;
};

class Sop : public ReferenceLearner {
 public:
  Sop(std::size_t d, const HyperParams& p) : ReferenceLearner(d), a_(p.get("a")), s_(d + 1, 0.0) {}
  double score(const std::vector<double>& x) const override {
    double sum = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (touched(x[i])) sum += w_[i] * x[i] / (a_ + s_[i] + x[i] * x[i]);
    }
    return sum;
  }
  void step(const std::vector<double>& x, double y) override {
    t_ += 1;
    if (y * score(x) > 0) return;
    for (std::size_t i = 0; i < x.size(); ++i) {
      w_[i] += y * x[i];
      s_[i] += x[i] * x[i];
    }
  }
  std::vector<double> aux(std::string_view name) const override {
    return name == "S" ? s_ : std::vector<double>{};
  }

 private:
  double a_;
  std::vector<double> s_;
};

class Cw : public ReferenceLearner {
 public:
  Cw(std::size_t d, const HyperParams& p, bool exact)
      : ReferenceLearner(d), phi_(p.get("phi")), exact_(exact), sigma_(d + 1, 1.0) {}
  void step(const std::vector<double>& x, double y) override {
    t_ += 1;
    last_alpha_ = 0;
    const double m = y * score(x);
    double v = 0;
    for (std::size_t i = 0; i < x.size(); ++i) v += sigma_[i] * x[i] * x[i];
    if (v == 0) return;
    const double phi = phi_;
    double alpha = 0;
    double gain = 0;
    if (!exact_) {
      const double b = 1 + 2 * phi * m;
      const double root = std::sqrt(std::max(0.0, b * b - 8 * phi * (m - phi * v)));
      // Rationalized when b > 0 to avoid cancelling -b against the root.
      alpha = b > 0 ? 2 * (phi * v - m) / (v * (b + root)) : (-b + root) / (4 * phi * v);
      alpha = std::max(0.0, alpha);
      gain = 2 * alpha * phi;
    } else {
      const double psi = 1 + phi * phi / 2;
      const double zeta = 1 + phi * phi;
      const double root = std::sqrt(m * m * std::pow(phi, 4) / 4 + v * phi * phi * zeta);
      // For m > 0 the numerator equals zeta (v phi^2 - m^2) / (m psi + root).
      alpha = m > 0 ? (v * phi * phi - m * m) / (v * (m * psi + root)) : (-m * psi + root) / (v * zeta);
      alpha = std::max(0.0, alpha);
      // sqrt(u) is the positive root of s^2 + alpha v phi s - v.
      const double sd = 2 * v / (alpha * v * phi + std::sqrt(alpha * alpha * v * v * phi * phi + 4 * v));
      const double u = sd * sd;
      gain = alpha > 0 ? alpha * phi / std::sqrt(u) : 0;
    }
    if (alpha <= 0) return;
    last_alpha_ = alpha;
    for (std::size_t i = 0; i < x.size(); ++i) {
      w_[i] += alpha * y * sigma_[i] * x[i];
      sigma_[i] = 1 / (1 / sigma_[i] + gain * x[i] * x[i]);
    }
  }
  std::vector<double> aux(std::string_view name) const override {
    return name == "sigma" ? sigma_ : std::vector<double>{};
  }

 private:
  double phi_;
  bool exact_;
  std::vector<double> sigma_;
};

class Arow : public ReferenceLearner {
 public:
  Arow(std::size_t d, const HyperParams& p) : ReferenceLearner(d), r_(p.get("r")), sigma_(d + 1, 1.0) {}
  void step(const std::vector<double>& x, double y) override {
    t_ += 1;
    const double m = y * score(x);
    if (1 - m <= 0) return;
    double v = 0;
    for (std::size_t i = 0; i < x.size(); ++i) v += sigma_[i] * x[i] * x[i];
    const double beta = 1 / (v + r_);
    const double alpha = beta * (1 - m);
    if (v == 0) return;
    for (std::size_t i = 0; i < x.size(); ++i) {
      w_[i] += alpha * y * sigma_[i] * x[i];
      sigma_[i] -= beta * sigma_[i] * sigma_[i] * x[i] * x[i];
    }
  }
  std::vector<double> aux(std::string_view name) const override {
    return name == "sigma" ? sigma_ : std::vector<double>{};
  }

 private:
  double r_;
  std::vector<double> sigma_;
};

class AdaFobos : public ReferenceLearner {
 public:
  AdaFobos(std::size_t d, const HyperParams& p, bool l1)
      : ReferenceLearner(d),
        eta_(p.get("eta")),
        delta_(p.get("delta")),
        lambda_(l1 ? p.get("lambda") : 0.0),
        g2_(d + 1, 0.0) {}
  void step(const std::vector<double>& x, double y) override {
    t_ += 1;
    const bool active = hinge(y * score(x)) > 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double g = active ? -y * x[i] : 0.0;
      g2_[i] += g * g;
      const double h = delta_ + std::sqrt(g2_[i]);
      w_[i] = shrink(w_[i] - eta_ * g / h, eta_ * lambda_ / h);
    }
  }
  std::vector<double> aux(std::string_view name) const override {
    return name == "G" ? g2_ : std::vector<double>{};
  }

 private:
  double eta_, delta_, lambda_;
  std::vector<double> g2_;
};

class AdaRda : public ReferenceLearner {
 public:
  AdaRda(std::size_t d, const HyperParams& p, bool l1)
      : ReferenceLearner(d),
        eta_(p.get("eta")),
        delta_(p.get("delta")),
        lambda_(l1 ? p.get("lambda") : 0.0),
        gsum_(d + 1, 0.0),
        g2_(d + 1, 0.0) {}
  void step(const std::vector<double>& x, double y) override {
    t_ += 1;
    const bool active = hinge(y * score(x)) > 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double g = active ? -y * x[i] : 0.0;
      gsum_[i] += g;
      g2_[i] += g * g;
      const double gbar = gsum_[i] / t_;
      const double h = delta_ + std::sqrt(g2_[i]);
      w_[i] = -sgn(gbar) * (eta_ * t_ / h) * std::max(0.0, std::abs(gbar) - lambda_);
    }
  }
  std::vector<double> aux(std::string_view name) const override {
    if (name == "G") return g2_;
    if (name == "gsum") return gsum_;
    return {};
  }

 private:
  double eta_, delta_, lambda_;
  std::vector<double> gsum_, g2_;
};

// Truncated gradient with period K and threshold theta; FOBOS-L1 is the
// K = 1, theta = infinity case with rate lambda.
class Truncated : public ReferenceLearner {
 public:
  Truncated(std::size_t d, double eta, double power, double rate, int period, double theta)
      : ReferenceLearner(d), eta_(eta), power_(power), rate_(rate), period_(period), theta_(theta) {}
  void step(const std::vector<double>& x, double y) override {
    t_ += 1;
    const double eta = eta_ / std::pow(t_, power_);
    if (hinge(y * score(x)) > 0) {
      for (std::size_t i = 0; i < x.size(); ++i) w_[i] += eta * y * x[i];
    }
    if (static_cast<long>(t_) % period_ != 0) return;
    const double amount = eta * rate_ * period_;
    for (double& v : w_) {
      if (v >= 0 && v <= theta_) {
        v = std::max(0.0, v - amount);
      } else if (v < 0 && v >= -theta_) {
        v = std::min(0.0, v + amount);
      }
    }
  }

 private:
  double eta_, power_, rate_;
  int period_;
  double theta_;
};

}  // namespace

double ReferenceLearner::score(const std::vector<double>& x) const { return dense_dot(w_, x); }

std::vector<double> ReferenceLearner::aux(std::string_view) const { return {}; }

std::unique_ptr<ReferenceLearner> make_reference(std::string_view algo, const HyperParams& p,
                                                 std::size_t d) {
  if (algo == "perceptron") return std::make_unique<Perceptron>(d);
  if (algo == "ogd") return std::make_unique<Ogd>(d, p);
  if (algo == "pa") return std::make_unique<Pa>(d, 0, p);
  if (algo == "pa1") return std::make_unique<Pa>(d, 1, p);
  if (algo == "pa2") return std::make_unique<Pa>(d, 2, p);
  if (algo == "alma") return std::make_unique<Alma>(d, p);
  if (algo == "rda") return std::make_unique<Rda>(d, p, false, false);
  if (algo == "rda-l1") return std::make_unique<Rda>(d, p, true, false);
  if (algo == "erda-l1") return std::make_unique<Rda>(d, p, true, true);
  if (algo == "sop") return std::make_unique<Sop>(d, p);
  if (algo == "cw") return std::make_unique<Cw>(d, p, false);
  if (algo == "eccw") return std::make_unique<Cw>(d, p, true);
  if (algo == "arow") return std::make_unique<Arow>(d, p);
  if (algo == "ada-fobos") return std::make_unique<AdaFobos>(d, p, false);
  if (algo == "ada-fobos-l1") return std::make_unique<AdaFobos>(d, p, true);
  if (algo == "ada-rda") return std::make_unique<AdaRda>(d, p, false);
  if (algo == "ada-rda-l1") return std::make_unique<AdaRda>(d, p, true);
  if (algo == "stg") {
    return std::make_unique<Truncated>(d, p.get("eta"), p.get("power_t"), p.get("lambda"),
                                       static_cast<int>(p.get("K")), p.get("theta"));
  }
  if (algo == "fobos-l1") {
    return std::make_unique<Truncated>(d, p.get("eta"), p.get("power_t"), p.get("lambda"), 1,
                                       INFINITY);
  }
  throw std::invalid_argument("no reference for " + std::string(algo));
}

namespace {

template <typename F>
double increasing_root(F f) {
  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 400 && hi - lo > 0.0; ++i) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid == lo || mid == hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return lo + (hi - lo) / 2.0;
}

}  // namespace

double numeric_cw_alpha(double margin, double variance, double phi) {
  auto f = [&](double a) {
    const double posterior = variance / (1.0 + 2.0 * a * phi * variance);
    return margin + a * variance - phi * posterior;
  };
  if (f(0.0) >= 0.0) return 0.0;
  return increasing_root(f);
}

double numeric_eccw_alpha(double margin, double variance, double phi) {
  // Posterior standard deviation s solves s^2 (1 + a phi v / s) = v.
  auto posterior_sd = [&](double a) {
    auto g = [&](double s) { return s * s + a * phi * variance * s - variance; };
    return increasing_root(g);
  };
  auto f = [&](double a) { return margin + a * variance - phi * posterior_sd(a); };
  if (f(0.0) >= 0.0) return 0.0;
  return increasing_root(f);
}

}  // namespace sol::testing
