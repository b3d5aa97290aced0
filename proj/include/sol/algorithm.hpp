#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sol/hyper_params.hpp"
#include "sol/loss.hpp"
#include "sol/model.hpp"
#include "sol/sparse_vector.hpp"

namespace sol {

struct ParamSpec {
  std::string_view name;
  double default_value;
  std::string_view help;
};

// One weight row participating in an update, with the sign its gradient takes.
// Binary: {row 0, y}. Max-score multi-class: {true class, +1} and
// {top competitor, -1}. One-vs-rest: one target per call.
struct Target {
  std::size_t row;
  double sign;
};

// An online learner. Learners are stateless; everything they read and write
// lives in ModelState so a model can be saved and resumed.
class Algorithm {
 public:
  virtual ~Algorithm() = default;

  virtual std::string_view name() const = 0;
  virtual std::string_view description() const = 0;
  virtual std::span<const ParamSpec> params() const = 0;

  virtual LossKind default_loss() const { return LossKind::kHinge; }
  // Learners whose rule is tied to one loss reject any other.
  virtual bool loss_is_fixed() const { return false; }

  // Range checks on a fully-defaulted parameter set.
  virtual void validate(const HyperParams& params) const { (void)params; }

  // Registers aux arrays and scalars on a fresh model.
  virtual void init_state(ModelState& model) const { (void)model; }
  // Rebuilds non-persistent bookkeeping for a model read from disk.
  virtual void after_load(ModelState& model) const { (void)model; }

  // Lazy learners keep weights that are only current after flush().
  virtual bool lazy() const { return false; }
  // save_model writes a flushed copy unless the pending state is itself saved.
  virtual bool flush_before_save() const { return lazy(); }

  // Current weights of row at x's coordinates. Lazy learners resolve pending
  // regularization here without writing it back.
  virtual void effective_weights(const ModelState& model, std::size_t row,
                                 const SparseVector& x, std::span<double> out) const;

  virtual double score(const ModelState& model, std::size_t row,
                       const SparseVector& x) const;

  // Called with model.t already counting the current example. margin is
  // sum(sign * score(row)) over targets for binary and one-vs-rest calls, and
  // score(true) - score(competitor) for max-score pairs. Returns true when
  // the learner's gradient-driven state changed.
  virtual bool update(ModelState& model, const SparseVector& x,
                      std::span<const Target> targets, double margin) const = 0;

  // Once per example after all update calls of that step.
  virtual void end_step(ModelState& model) const { (void)model; }

  // Materializes every coordinate so weights hold final values.
  virtual void flush(ModelState& model) const { (void)model; }
};

// nullptr when unknown.
const Algorithm* find_algorithm(std::string_view name);
// Every registered learner in listing order.
std::span<const Algorithm* const> all_algorithms();
std::string algorithm_names(std::string_view separator = ", ");

// sign(v) * max(0, |v| - threshold), exact zero inside the threshold region.
inline double soft_threshold(double v, double threshold) {
  if (v > threshold) return v - threshold;
  if (v < -threshold) return v + threshold;
  return 0.0;
}

}  // namespace sol
