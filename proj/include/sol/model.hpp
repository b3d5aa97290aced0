#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sol/hyper_params.hpp"
#include "sol/loss.hpp"
#include "sol/sparse_vector.hpp"

namespace sol {

class Algorithm;
struct ModelConfig;

// Dense array that grows on write; coordinates never written read as fill.
class GrowableArray {
 public:
  explicit GrowableArray(double fill = 0.0) : fill_(fill) {}

  double get(std::size_t i) const { return i < data_.size() ? data_[i] : fill_; }

  double& at(std::size_t i) {
    if (i >= data_.size()) data_.resize(i + 1, fill_);
    return data_[i];
  }

  void resize(std::size_t n) {
    if (n > data_.size()) data_.resize(n, fill_);
  }

  double fill() const { return fill_; }
  std::size_t size() const { return data_.size(); }
  std::span<const double> view() const { return data_; }
  std::span<double> view() { return data_; }

  friend bool operator==(const GrowableArray&, const GrowableArray&) = default;

 private:
  double fill_;
  std::vector<double> data_;
};

// Per-row auxiliary state (one row per stored weight vector).
struct AuxArray {
  std::vector<GrowableArray> rows;
  // Persistent arrays are written to model files. Bookkeeping such as lazy
  // timestamps is rebuilt on load instead.
  bool persistent = true;

  friend bool operator==(const AuxArray&, const AuxArray&) = default;
};

enum class MulticlassMode { kMaxScore, kOneVsRest };

std::string_view multiclass_name(MulticlassMode mode);
std::optional<MulticlassMode> parse_multiclass(std::string_view name);

struct Prediction {
  int label = 0;
  std::vector<double> scores;
};

// Everything a learner needs to resume training: weights, auxiliary arrays,
// per-row scalars and the step counter.
class ModelState {
 public:
  std::string algo_name;
  std::size_t class_count = 2;
  LossKind loss_kind = LossKind::kHinge;
  HyperParams hyper;
  bool bias_enabled = false;
  MulticlassMode multiclass = MulticlassMode::kMaxScore;
  // Examples processed so far.
  std::uint64_t t = 0;

  std::vector<GrowableArray> weights;
  std::map<std::string, AuxArray, std::less<>> aux;
  std::map<std::string, std::vector<double>, std::less<>> scalars;

  // Binary problems store one weight vector, multi-class one per class.
  std::size_t row_count() const { return class_count == 2 ? 1 : class_count; }

  const Algorithm& algorithm() const { return *algorithm_; }

  AuxArray& aux_array(std::string_view name);
  const AuxArray& aux_array(std::string_view name) const;
  std::vector<double>& scalar(std::string_view name);
  const std::vector<double>& scalar(std::string_view name) const;

  // Adds an auxiliary array with one row per weight vector.
  void add_aux(const std::string& name, double fill, bool persistent = true);
  // Per-row scalars by default; count = 1 for a model-wide value.
  void add_scalar(const std::string& name, double initial, std::size_t count = 0);

  // Largest stored dimension over weights and aux rows.
  std::size_t dimension() const;
  // Exact nonzeros summed over all weight vectors.
  std::size_t nnz() const;

  friend bool operator==(const ModelState& a, const ModelState& b);

 private:
  friend ModelState make_model(std::string_view, const ModelConfig&);
  const Algorithm* algorithm_ = nullptr;
};

struct ModelConfig {
  std::size_t class_count = 2;
  // Unset picks the algorithm's own loss (hinge for most learners).
  std::optional<LossKind> loss;
  HyperParams params;
  bool bias = false;
  MulticlassMode multiclass = MulticlassMode::kMaxScore;
};

// Zero-initialized model for the named algorithm. Unknown algorithms,
// unknown parameter names and out-of-range values throw ConfigError.
ModelState make_model(std::string_view algo, const ModelConfig& config = {});

// Scores under the algorithm's own prediction rule; the binary label is 1 iff
// the score is positive, the multi-class label is the lowest-id argmax.
Prediction predict(const ModelState& model, const SparseVector& x);

// Weights of one row for x's coordinates as an eager learner would hold them
// now, deferred regularization included. The model is not modified.
std::vector<double> lazy_l1_scaffold(const ModelState& model, std::size_t row,
                                     const SparseVector& x);

struct StepOutcome {
  int predicted = 0;
  // The learner changed its gradient-driven state on this example.
  bool updated = false;
};

// One round of the online protocol: predict, reveal label, suffer loss,
// update when required. Increments model.t exactly once.
StepOutcome learn_one(ModelState& model, const Example& example);

// Applies every pending lazy update so weights hold final values.
void flush(ModelState& model);

void save_model(const ModelState& model, std::ostream& out);
void save_model(const ModelState& model, const std::filesystem::path& path);
ModelState load_model(std::istream& in);
ModelState load_model(const std::filesystem::path& path);

}  // namespace sol
