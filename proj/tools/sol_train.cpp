// sol_train: train an online linear classifier and save the model.
//
//   sol_train [-a algo] [--params k=v,...] [--cv name=start:factor:end] train_file model_file

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "sol/algorithm.hpp"
#include "sol/model.hpp"
#include "sol/pario.hpp"
#include "sol/train.hpp"
#include "tool_support.hpp"

namespace {

struct Args {
  std::string train_file;
  std::string model_file;
  std::string algo = "ogd";
  std::vector<std::string> params;
  std::string loss;
  std::string format;
  std::size_t classes = 2;
  std::size_t passes = 1;
  bool bias = false;
  std::string multiclass = "maxscore";
  std::vector<std::string> cv;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::string cache;
  sol::PipelineOptions pipeline;
};

int run(const Args& args) {
  using namespace sol;
  if (!find_algorithm(args.algo)) {
    std::cerr << "sol_train: unknown algorithm '" << args.algo << "'\n"
              << "valid algorithms: " << algorithm_names() << "\n";
    return tools::kExitUsage;
  }

  ModelConfig config;
  config.class_count = args.classes;
  config.bias = args.bias;
  if (!args.loss.empty()) {
    config.loss = parse_loss(args.loss);
    if (!config.loss) throw ConfigError("unknown loss '" + args.loss + "'");
  }
  const auto mode = parse_multiclass(args.multiclass);
  if (!mode) throw ConfigError("unknown multiclass mode '" + args.multiclass + "'");
  config.multiclass = *mode;
  for (const auto& p : args.params) config.params.merge(HyperParams::parse(p, ','));

  std::vector<ParamGrid> grids;
  for (const auto& g : args.cv) {
    grids.push_back(parse_grid(g));
    if (grids.back().name.empty()) throw ConfigError("--cv needs name=start:factor:end");
  }
  make_model(args.algo, config);  // configuration errors before touching data

  DataSource source = DataSource::from_path(args.train_file, tools::format_flag(args.format),
                                            args.classes);
  if (!std::filesystem::exists(source.path)) throw IoError("cannot open " + args.train_file);
  if (!args.cache.empty()) {
    if (!std::filesystem::exists(args.cache)) {
      DataSource raw = source;
      raw.class_count = args.classes;
      ChunkPipeline pipeline(raw, args.pipeline);
      BinaryWriter writer(args.cache);
      while (auto chunk = pipeline.next()) {
        for (const auto& ex : chunk->examples) writer.write(ex);
      }
      writer.finish();
    }
    source = DataSource::from_path(args.cache, DataFormat::kBinary, args.classes);
  }

  if (!grids.empty()) {
    const auto examples = load_all(source, args.pipeline);
    CvOptions cv;
    cv.folds = args.folds;
    cv.seed = args.seed;
    cv.passes = args.passes;
    const CvResult result = cross_validate(args.algo, config, grids, examples, cv);
    for (const auto& [name, value] : result.best) config.params.set(name, value);
    std::cout << cv_params_line(result.best) << "\n";
  }

  ModelState model = make_model(args.algo, config);
  TrainOptions train;
  train.passes = args.passes;
  train.pipeline = args.pipeline;
  const TrainReport report = train_online(model, source, train);
  save_model(model, std::filesystem::path(args.model_file));

  const std::size_t capacity = model.dimension() * model.row_count();
  const double sparsity =
      capacity == 0 ? 1.0 : 1.0 - static_cast<double>(report.final_nnz) / capacity;
  char buf[64];
  std::cout << "algorithm: " << model.algo_name << "\n";
  std::cout << "examples: " << report.examples_seen << "\n";
  std::cout << "updates: " << report.update_count << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", report.online_error_rate);
  std::cout << "online error rate: " << buf << "\n";
  std::cout << "model nnz: " << report.final_nnz << "\n";
  std::cout << "model dimension: " << model.dimension() << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", sparsity);
  std::cout << "model sparsity: " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.3f", report.elapsed_seconds);
  std::cerr << "training time: " << buf << " s\n";
  return tools::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  Args args;
  CLI::App app{"Train an online linear classifier.", "sol_train"};
  app.add_option("train_file", args.train_file, "Training data")->required();
  app.add_option("model_file", args.model_file, "Output model")->required();
  app.add_option("-a,--algo", args.algo, "Algorithm name")->capture_default_str();
  app.add_option("--params", args.params, "Hyperparameters k=v[,k=v...] (repeatable)");
  app.add_option("--loss", args.loss, "hinge, logistic, square or bool");
  app.add_option("-f,--format", args.format, "Input format: libsvm, csv or bin");
  app.add_option("-c,--classes", args.classes, "Number of classes")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20))
      ->capture_default_str();
  app.add_option("--passes", args.passes, "Passes over the data")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--bias", args.bias, "Learn a bias term (feature 0)");
  app.add_option("--multiclass", args.multiclass, "Multi-class reduction: maxscore or ovr")
      ->capture_default_str();
  app.add_option("--cv", args.cv, "Cross-validate name=start:factor:end (repeatable)");
  app.add_option("--fold", args.folds, "Cross-validation folds")->capture_default_str();
  app.add_option("--seed", args.seed, "Cross-validation shuffle seed")->capture_default_str();
  app.add_option("--cache", args.cache, "Binary cache to create or reuse");
  sol::tools::add_pipeline_flags(app, args.pipeline);
  app.footer(sol::tools::algorithm_listing());

  if (auto code = sol::tools::parse_args(app, argc, argv)) return *code;
  return sol::tools::guarded("sol_train", [&] { return run(args); });
}
