#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sol/model.hpp"
#include "sol/pario.hpp"

namespace sol {

struct TrainReport {
  std::uint64_t examples_seen = 0;
  std::uint64_t update_count = 0;
  // Mistakes made before each update, over examples_seen.
  double online_error_rate = 0.0;
  double elapsed_seconds = 0.0;
  std::size_t final_nnz = 0;
};

struct TrainOptions {
  std::size_t passes = 1;
  PipelineOptions pipeline;
};

// Runs the online protocol over the source, passes times, then flushes so the
// model holds final weights. An empty source is an error.
TrainReport train_online(ModelState& model, const DataSource& source,
                         const TrainOptions& options = {});
TrainReport train_online(ModelState& model, std::span<const Example> examples,
                         std::size_t passes = 1);

struct Evaluation {
  double accuracy = 0.0;
  std::uint64_t correct = 0;
  std::uint64_t total = 0;
  std::vector<int> predictions;
};

// Labels outside the model's class range throw EvaluationError.
Evaluation evaluate(const ModelState& model, std::span<const Example> examples);
Evaluation evaluate(const ModelState& model, const DataSource& source,
                    const PipelineOptions& options = {});

// "test accuracy: 0.9545"
std::string accuracy_line(double accuracy);

// ---- cross validation ----

struct ParamGrid {
  std::string name;
  std::vector<double> values;
};

// "name=start:factor:end" or just "start:factor:end" (name left empty).
ParamGrid parse_grid(std::string_view spec);

struct CvOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::size_t passes = 1;
  // Concurrent grid points; 0 uses the hardware thread count.
  std::size_t threads = 0;
};

struct CvPoint {
  std::vector<std::pair<std::string, double>> params;
  double mean_accuracy = 0.0;
};

struct CvResult {
  std::vector<std::pair<std::string, double>> best;
  double best_accuracy = 0.0;
  // Every grid point in lexicographic grid order.
  std::vector<CvPoint> points;
};

// k-fold search over the cartesian product of grids. base.params supplies the
// values not being searched. Fold membership comes from one seeded shuffle
// split into contiguous blocks; ties go to the earliest grid point.
CvResult cross_validate(std::string_view algo, const ModelConfig& base,
                        std::span<const ParamGrid> grids, std::span<const Example> examples,
                        const CvOptions& options = {});

// Fold index of each example, as used by cross_validate.
std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t folds, std::uint64_t seed);

// "cross validation parameters: [('eta', 32.0)]"
std::string cv_params_line(std::span<const std::pair<std::string, double>> params);

// Python-style repr of a float: "32.0", "0.25", "1e-05".
std::string python_float_repr(double value);

}  // namespace sol
