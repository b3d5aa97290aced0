#include "sol/train.hpp"

#include <chrono>
#include <cstdio>
#include <limits>

#include "sol/error.hpp"

namespace sol {
namespace {

class Tally {
 public:
  explicit Tally(ModelState& model) : model_(model) {}

  void step(const Example& ex) {
    const StepOutcome out = learn_one(model_, ex);
    ++report_.examples_seen;
    report_.update_count += out.updated;
    mistakes_ += out.predicted != ex.label;
  }

  TrainReport finish(std::chrono::steady_clock::time_point start) {
    if (report_.examples_seen == 0) throw Error("empty source");
    flush(model_);
    report_.online_error_rate =
        static_cast<double>(mistakes_) / static_cast<double>(report_.examples_seen);
    report_.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report_.final_nnz = model_.nnz();
    return report_;
  }

 private:
  ModelState& model_;
  TrainReport report_;
  std::uint64_t mistakes_ = 0;
};

void require_passes(std::size_t passes) {
  if (passes == 0) throw ConfigError("passes must be at least 1");
}

}  // namespace

TrainReport train_online(ModelState& model, const DataSource& source,
                         const TrainOptions& options) {
  require_passes(options.passes);
  const auto start = std::chrono::steady_clock::now();
  Tally tally(model);
  DataSource checked = source;
  checked.class_count = model.class_count;
  for (std::size_t pass = 0; pass < options.passes; ++pass) {
    ChunkPipeline pipeline(checked, options.pipeline);
    while (auto chunk = pipeline.next()) {
      for (const auto& ex : chunk->examples) tally.step(ex);
    }
  }
  return tally.finish(start);
}

TrainReport train_online(ModelState& model, std::span<const Example> examples,
                         std::size_t passes) {
  require_passes(passes);
  const auto start = std::chrono::steady_clock::now();
  Tally tally(model);
  for (std::size_t pass = 0; pass < passes; ++pass) {
    for (const auto& ex : examples) tally.step(ex);
  }
  return tally.finish(start);
}

Evaluation evaluate(const ModelState& model, std::span<const Example> examples) {
  Evaluation ev;
  ev.predictions.reserve(examples.size());
  for (const auto& ex : examples) {
    if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= model.class_count) {
      throw EvaluationError("label " + std::to_string(ex.label) + " outside model classes 0.." +
                            std::to_string(model.class_count - 1));
    }
    const int p = predict(model, ex.features).label;
    ev.predictions.push_back(p);
    ev.correct += p == ex.label;
  }
  ev.total = examples.size();
  if (ev.total == 0) throw EvaluationError("empty source");
  ev.accuracy = static_cast<double>(ev.correct) / static_cast<double>(ev.total);
  return ev;
}

Evaluation evaluate(const ModelState& model, const DataSource& source,
                    const PipelineOptions& options) {
  // Labels are range-checked here rather than by the loader.
  DataSource unchecked = source;
  unchecked.class_count = std::numeric_limits<int>::max();
  return evaluate(model, load_all(unchecked, options));
}

std::string accuracy_line(double accuracy) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "test accuracy: %.4f", accuracy);
  return buf;
}

}  // namespace sol
