#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "sol/error.hpp"
#include "sol/train.hpp"

namespace sol {

ParamGrid parse_grid(std::string_view spec) {
  ParamGrid grid;
  const std::string original(spec);
  const auto eq = spec.find('=');
  if (eq != std::string_view::npos) {
    grid.name = std::string(spec.substr(0, eq));
    spec.remove_prefix(eq + 1);
    if (grid.name.empty()) throw ConfigError("grid '" + original + "': missing parameter name");
  }
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string_view::npos || spec.find(':', c2 + 1) != std::string_view::npos) {
    throw ConfigError("grid '" + original + "': expected start:factor:end");
  }
  double start = 0.0;
  double factor = 0.0;
  double end = 0.0;
  try {
    start = parse_double(spec.substr(0, c1));
    factor = parse_double(spec.substr(c1 + 1, c2 - c1 - 1));
    end = parse_double(spec.substr(c2 + 1));
  } catch (const ConfigError& e) {
    throw ConfigError("grid '" + original + "': " + e.what());
  }
  if (!(start > 0.0) || !std::isfinite(start)) {
    throw ConfigError("grid '" + original + "': start must be positive");
  }
  if (!(factor > 1.0) || !std::isfinite(factor)) {
    throw ConfigError("grid '" + original + "': factor must be greater than 1");
  }
  if (!(end >= start) || !std::isfinite(end)) {
    throw ConfigError("grid '" + original + "': end must be at least start");
  }
  const double limit = end * (1.0 + 1e-12);
  for (double v = start; v <= limit; v *= factor) grid.values.push_back(v);
  return grid;
}

std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross validation needs at least 2 folds");
  if (n < folds) {
    throw ConfigError("cross validation: " + std::to_string(n) + " examples for " +
                      std::to_string(folds) + " folds");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  // Shuffled position p falls in block floor(p * folds / n).
  std::vector<std::size_t> fold(n);
  for (std::size_t p = 0; p < n; ++p) fold[order[p]] = p * folds / n;
  return fold;
}

namespace {

std::vector<std::vector<std::pair<std::string, double>>> grid_points(
    std::span<const ParamGrid> grids) {
  std::vector<std::vector<std::pair<std::string, double>>> points(1);
  for (const auto& g : grids) {
    if (g.values.empty()) throw ConfigError("grid for '" + g.name + "' has no values");
    std::vector<std::vector<std::pair<std::string, double>>> next;
    next.reserve(points.size() * g.values.size());
    for (const auto& p : points) {
      for (const double v : g.values) {
        auto q = p;
        q.emplace_back(g.name, v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

}  // namespace

CvResult cross_validate(std::string_view algo, const ModelConfig& base,
                        std::span<const ParamGrid> grids, std::span<const Example> examples,
                        const CvOptions& options) {
  if (grids.empty()) throw ConfigError("cross validation needs at least one grid");
  for (const auto& g : grids) {
    if (g.name.empty()) throw ConfigError("cross validation grid needs a parameter name");
  }
  if (options.passes == 0) throw ConfigError("passes must be at least 1");
  const auto fold = fold_assignment(examples.size(), options.folds, options.seed);

  std::vector<std::vector<Example>> train(options.folds);
  std::vector<std::vector<Example>> held_out(options.folds);
  for (std::size_t k = 0; k < options.folds; ++k) {
    for (std::size_t i = 0; i < examples.size(); ++i) {
      (fold[i] == k ? held_out[k] : train[k]).push_back(examples[i]);
    }
  }

  const auto points = grid_points(grids);
  std::vector<ModelConfig> configs;
  configs.reserve(points.size());
  for (const auto& p : points) {
    ModelConfig cfg = base;
    for (const auto& [name, value] : p) cfg.params.set(name, value);
    make_model(algo, cfg);  // reject bad configs before any thread starts
    configs.push_back(std::move(cfg));
  }

  CvResult result;
  result.points.resize(points.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      try {
        double sum = 0.0;
        for (std::size_t k = 0; k < options.folds; ++k) {
          ModelState model = make_model(algo, configs[i]);
          train_online(model, train[k], options.passes);
          sum += evaluate(model, held_out[k]).accuracy;
        }
        result.points[i].params = points[i];
        result.points[i].mean_accuracy = sum / static_cast<double>(options.folds);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::size_t threads = options.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, points.size());
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.points.size(); ++i) {
    if (result.points[i].mean_accuracy > result.points[best].mean_accuracy) best = i;
  }
  result.best = result.points[best].params;
  result.best_accuracy = result.points[best].mean_accuracy;
  return result;
}

std::string python_float_repr(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return std::signbit(value) ? "-0.0" : "0.0";
  char buf[64];
  const auto [p, ec] =
      std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific);
  std::string sci(buf, p);  // e.g. "-3.2e+01"
  const auto e_pos = sci.find('e');
  const int exp = std::stoi(sci.substr(e_pos + 1));
  std::string mantissa = sci.substr(0, e_pos);
  std::string sign;
  if (mantissa.front() == '-') {
    sign = "-";
    mantissa.erase(0, 1);
  }
  std::string digits;
  for (char c : mantissa) {
    if (c != '.') digits += c;
  }
  if (exp < -4 || exp >= 16) {
    std::string out = sign + digits.substr(0, 1);
    if (digits.size() > 1) out += "." + digits.substr(1);
    char ebuf[16];
    std::snprintf(ebuf, sizeof ebuf, "e%c%02d", exp < 0 ? '-' : '+', std::abs(exp));
    return out + ebuf;
  }
  std::string out;
  if (exp < 0) {
    out = "0." + std::string(static_cast<std::size_t>(-exp - 1), '0') + digits;
  } else {
    const auto int_len = static_cast<std::size_t>(exp) + 1;
    if (digits.size() <= int_len) {
      out = digits + std::string(int_len - digits.size(), '0') + ".0";
    } else {
      out = digits.substr(0, int_len) + "." + digits.substr(int_len);
    }
  }
  return sign + out;
}

std::string cv_params_line(std::span<const std::pair<std::string, double>> params) {
  std::string out = "cross validation parameters: [";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i > 0) out += ", ";
    out += "('" + params[i].first + "', " + python_float_repr(params[i].second) + ")";
  }
  return out + "]";
}

}  // namespace sol
