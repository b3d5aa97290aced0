#include "sol/model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "sol/algorithm.hpp"
#include "sol/error.hpp"

namespace sol {

std::string_view multiclass_name(MulticlassMode mode) {
  return mode == MulticlassMode::kOneVsRest ? "ovr" : "maxscore";
}

std::optional<MulticlassMode> parse_multiclass(std::string_view name) {
  if (name == "maxscore") return MulticlassMode::kMaxScore;
  if (name == "ovr") return MulticlassMode::kOneVsRest;
  return std::nullopt;
}

AuxArray& ModelState::aux_array(std::string_view name) {
  auto it = aux.find(name);
  if (it == aux.end()) throw Error("model has no aux array '" + std::string(name) + "'");
  return it->second;
}

const AuxArray& ModelState::aux_array(std::string_view name) const {
  auto it = aux.find(name);
  if (it == aux.end()) throw Error("model has no aux array '" + std::string(name) + "'");
  return it->second;
}

std::vector<double>& ModelState::scalar(std::string_view name) {
  auto it = scalars.find(name);
  if (it == scalars.end()) throw Error("model has no scalar '" + std::string(name) + "'");
  return it->second;
}

const std::vector<double>& ModelState::scalar(std::string_view name) const {
  auto it = scalars.find(name);
  if (it == scalars.end()) throw Error("model has no scalar '" + std::string(name) + "'");
  return it->second;
}

void ModelState::add_aux(const std::string& name, double fill, bool persistent) {
  AuxArray array;
  array.rows.assign(row_count(), GrowableArray(fill));
  array.persistent = persistent;
  aux[name] = std::move(array);
}

void ModelState::add_scalar(const std::string& name, double initial, std::size_t count) {
  scalars[name].assign(count == 0 ? row_count() : count, initial);
}

std::size_t ModelState::dimension() const {
  std::size_t d = 0;
  for (const auto& w : weights) d = std::max(d, w.size());
  for (const auto& [name, array] : aux) {
    for (const auto& row : array.rows) d = std::max(d, row.size());
  }
  return d;
}

std::size_t ModelState::nnz() const {
  std::size_t n = 0;
  for (const auto& w : weights) {
    for (double v : w.view()) n += (v != 0.0);
  }
  return n;
}

bool operator==(const ModelState& a, const ModelState& b) {
  return a.algo_name == b.algo_name && a.class_count == b.class_count &&
         a.loss_kind == b.loss_kind && a.hyper == b.hyper &&
         a.bias_enabled == b.bias_enabled && a.multiclass == b.multiclass && a.t == b.t &&
         a.weights == b.weights && a.aux == b.aux && a.scalars == b.scalars;
}

ModelState make_model(std::string_view algo_name, const ModelConfig& config) {
  const Algorithm* algo = find_algorithm(algo_name);
  if (algo == nullptr) {
    throw ConfigError("unknown algorithm '" + std::string(algo_name) +
                      "'; valid names: " + algorithm_names());
  }
  if (config.class_count < 2) throw ConfigError("class count must be at least 2");

  HyperParams params;
  const auto specs = algo->params();
  for (const auto& spec : specs) params.set(std::string(spec.name), spec.default_value);
  for (const auto& [name, value] : config.params.values()) {
    const bool known = std::any_of(specs.begin(), specs.end(),
                                   [&](const ParamSpec& s) { return s.name == name; });
    if (!known) {
      std::string allowed;
      for (const auto& s : specs) allowed += (allowed.empty() ? "" : ", ") + std::string(s.name);
      throw ConfigError("parameter '" + name + "' is not used by " + std::string(algo->name()) +
                        (allowed.empty() ? " (it takes none)" : " (accepted: " + allowed + ")"));
    }
    params.set(name, value);
  }
  algo->validate(params);

  LossKind loss = config.loss.value_or(algo->default_loss());
  auto hinge_like = [](LossKind k) {
    return k == LossKind::kHinge || k == LossKind::kMaxScoreHinge;
  };
  if (algo->loss_is_fixed() && loss != algo->default_loss() &&
      !(hinge_like(loss) && hinge_like(algo->default_loss()))) {
    throw ConfigError(std::string(algo->name()) + " only supports the " +
                      std::string(loss_name(algo->default_loss())) + " loss");
  }
  if (config.class_count > 2 && config.multiclass == MulticlassMode::kMaxScore &&
      loss == LossKind::kHinge) {
    loss = LossKind::kMaxScoreHinge;
  } else if (config.class_count == 2 && loss == LossKind::kMaxScoreHinge) {
    loss = LossKind::kHinge;
  }

  ModelState model;
  model.algo_name = std::string(algo->name());
  model.class_count = config.class_count;
  model.loss_kind = loss;
  model.hyper = std::move(params);
  model.bias_enabled = config.bias;
  model.multiclass = config.multiclass;
  model.weights.assign(model.row_count(), GrowableArray(0.0));
  model.algorithm_ = algo;
  algo->init_state(model);
  return model;
}

namespace {

// Reusable buffer for effective weights on the hot path.
std::span<double> scratch(std::size_t n) {
  thread_local std::vector<double> buffer;
  if (buffer.size() < n) buffer.resize(n);
  return {buffer.data(), n};
}

int argmax_lowest(std::span<const double> scores, int skip = -1) {
  int best = -1;
  for (int c = 0; c < static_cast<int>(scores.size()); ++c) {
    if (c == skip) continue;
    if (best < 0 || scores[c] > scores[best]) best = c;
  }
  return best;
}

}  // namespace

void Algorithm::effective_weights(const ModelState& model, std::size_t row,
                                  const SparseVector& x, std::span<double> out) const {
  const auto& w = model.weights[row];
  const auto idx = x.indices();
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = w.get(idx[i]);
}

double Algorithm::score(const ModelState& model, std::size_t row,
                        const SparseVector& x) const {
  if (!lazy()) return dot(model.weights[row].view(), x);
  auto w = scratch(x.nnz());
  effective_weights(model, row, x, w);
  const auto val = x.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * double{val[i]};
  return sum;
}

Prediction predict(const ModelState& model, const SparseVector& features) {
  const SparseVector biased = model.bias_enabled ? features.with_bias() : SparseVector{};
  const SparseVector& x = model.bias_enabled ? biased : features;
  const Algorithm& algo = model.algorithm();
  Prediction p;
  if (model.class_count == 2) {
    const double s = algo.score(model, 0, x);
    p.scores = {s};
    p.label = s > 0.0 ? 1 : 0;
  } else {
    p.scores.resize(model.class_count);
    for (std::size_t c = 0; c < model.class_count; ++c) p.scores[c] = algo.score(model, c, x);
    p.label = argmax_lowest(p.scores);
  }
  return p;
}

std::vector<double> lazy_l1_scaffold(const ModelState& model, std::size_t row,
                                     const SparseVector& x) {
  std::vector<double> out(x.nnz());
  model.algorithm().effective_weights(model, row, x, out);
  return out;
}

StepOutcome learn_one(ModelState& model, const Example& example) {
  if (example.label < 0 || static_cast<std::size_t>(example.label) >= model.class_count) {
    throw FormatError("label " + std::to_string(example.label) + " outside class range 0.." +
                      std::to_string(model.class_count - 1));
  }
  const SparseVector biased =
      model.bias_enabled ? example.features.with_bias() : SparseVector{};
  const SparseVector& x = model.bias_enabled ? biased : example.features;
  const Algorithm& algo = model.algorithm();
  StepOutcome out;

  if (model.class_count == 2) {
    const double s = algo.score(model, 0, x);
    out.predicted = s > 0.0 ? 1 : 0;
    ++model.t;
    const double y = binary_sign(example.label);
    const Target target{0, y};
    out.updated = algo.update(model, x, {&target, 1}, y * s);
  } else {
    std::vector<double> scores(model.class_count);
    for (std::size_t c = 0; c < model.class_count; ++c) scores[c] = algo.score(model, c, x);
    out.predicted = argmax_lowest(scores);
    ++model.t;
    const int y = example.label;
    if (model.multiclass == MulticlassMode::kMaxScore) {
      const int rival = argmax_lowest(scores, y);
      const Target pair[2] = {{static_cast<std::size_t>(y), 1.0},
                              {static_cast<std::size_t>(rival), -1.0}};
      out.updated = algo.update(model, x, pair, scores[y] - scores[rival]);
    } else {
      for (std::size_t c = 0; c < model.class_count; ++c) {
        const double yc = static_cast<int>(c) == y ? 1.0 : -1.0;
        const Target target{c, yc};
        out.updated |= algo.update(model, x, {&target, 1}, yc * scores[c]);
      }
    }
  }
  algo.end_step(model);
  return out;
}

void flush(ModelState& model) { model.algorithm().flush(model); }

// Model text format:
//   algo: <name>            classes: <C>       loss: <kind>
//   params: k=v;...         bias: 0|1          multiclass: maxscore|ovr
//   t: <n>
//   [weights]               one "index:value" line per row, nonzeros only
//   [aux <name>]            one line per row, entries differing from fill
//   [scalar <name>]         one line of space-separated per-row values
namespace {

void write_row(std::ostream& out, const GrowableArray& row) {
  bool first = true;
  const auto data = row.view();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] == row.fill()) continue;
    if (!first) out << ' ';
    out << i << ':' << format_double(data[i]);
    first = false;
  }
  out << '\n';
}

void read_row(const std::string& line, GrowableArray& row, std::size_t line_no) {
  std::string_view rest(line);
  while (!rest.empty()) {
    const auto start = rest.find_first_not_of(" \t\r");
    if (start == std::string_view::npos) break;
    rest.remove_prefix(start);
    auto end = rest.find_first_of(" \t\r");
    auto token = rest.substr(0, end);
    rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
    const auto colon = token.find(':');
    std::size_t index = 0;
    auto res = std::from_chars(token.data(), token.data() + colon, index);
    if (colon == std::string_view::npos || res.ec != std::errc{} ||
        res.ptr != token.data() + colon) {
      throw ModelFormatError("model line " + std::to_string(line_no) + ": bad entry '" +
                             std::string(token) + "'");
    }
    try {
      row.at(index) = parse_double(token.substr(colon + 1));
    } catch (const ConfigError&) {
      throw ModelFormatError("model line " + std::to_string(line_no) + ": bad value in '" +
                             std::string(token) + "'");
    }
  }
}

}  // namespace

void save_model(const ModelState& original, std::ostream& out) {
  const ModelState* model = &original;
  ModelState flushed;
  if (original.algorithm().flush_before_save()) {
    flushed = original;
    flush(flushed);
    model = &flushed;
  }
  out << "algo: " << model->algo_name << '\n'
      << "classes: " << model->class_count << '\n'
      << "loss: " << loss_name(model->loss_kind) << '\n'
      << "params: " << model->hyper.to_string() << '\n'
      << "bias: " << (model->bias_enabled ? 1 : 0) << '\n'
      << "multiclass: " << multiclass_name(model->multiclass) << '\n'
      << "t: " << model->t << '\n';
  out << "[weights]\n";
  for (const auto& row : model->weights) write_row(out, row);
  for (const auto& [name, array] : model->aux) {
    if (!array.persistent) continue;
    out << "[aux " << name << "]\n";
    for (const auto& row : array.rows) write_row(out, row);
  }
  for (const auto& [name, values] : model->scalars) {
    out << "[scalar " << name << "]\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
      out << (i ? " " : "") << format_double(values[i]);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing model");
}

void save_model(const ModelState& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open model file for writing: " + path.string());
  save_model(model, out);
  out.flush();
  if (!out) throw IoError("failed writing model file: " + path.string());
}

ModelState load_model(std::istream& in) {
  static const std::set<std::string, std::less<>> kKeys = {
      "algo", "classes", "loss", "params", "bias", "multiclass", "t"};
  std::map<std::string, std::string, std::less<>> header;
  std::string line;
  std::size_t line_no = 0;
  bool have_section = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '[') {
      have_section = true;
      break;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw ModelFormatError("model line " + std::to_string(line_no) + ": expected 'key: value'");
    }
    std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    if (!value.empty() && value.front() == ' ') value.erase(0, 1);
    if (!kKeys.contains(key)) {
      throw ModelFormatError("model line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!header.emplace(key, value).second) {
      throw ModelFormatError("model line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  for (const auto& key : kKeys) {
    if (!header.contains(key)) throw ModelFormatError("model header missing '" + key + "'");
  }

  auto parse_count = [&](const std::string& key) {
    const std::string& text = header[key];
    std::uint64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
      throw ModelFormatError("model header '" + key + "' is not a count: '" + text + "'");
    }
    return v;
  };

  ModelConfig config;
  config.class_count = parse_count("classes");
  auto loss = parse_loss(header["loss"]);
  if (!loss) throw ModelFormatError("unknown loss '" + header["loss"] + "'");
  config.loss = loss;
  auto multiclass = parse_multiclass(header["multiclass"]);
  if (!multiclass) throw ModelFormatError("unknown multiclass mode '" + header["multiclass"] + "'");
  config.multiclass = *multiclass;
  const std::string& bias = header["bias"];
  if (bias != "0" && bias != "1") throw ModelFormatError("bias must be 0 or 1");
  config.bias = bias == "1";

  ModelState model;
  try {
    config.params = HyperParams::parse(header["params"], ';');
    model = make_model(header["algo"], config);
  } catch (const ConfigError& e) {
    throw ModelFormatError(std::string("invalid model header: ") + e.what());
  }
  model.t = parse_count("t");

  std::set<std::string, std::less<>> seen;
  while (have_section) {
    have_section = false;
    std::string section = line.substr(1, line.size() >= 2 ? line.size() - 2 : 0);
    if (line.back() != ']') throw ModelFormatError("model line " + std::to_string(line_no) + ": bad section");
    if (!seen.insert(section).second) throw ModelFormatError("duplicate section [" + section + "]");
    auto next_line = [&]() {
      if (!std::getline(in, line)) throw ModelFormatError("model truncated in section [" + section + "]");
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
    };
    if (section == "weights") {
      for (auto& row : model.weights) {
        next_line();
        read_row(line, row, line_no);
      }
    } else if (section.starts_with("aux ")) {
      const std::string name = section.substr(4);
      auto it = model.aux.find(name);
      if (it == model.aux.end() || !it->second.persistent) {
        throw ModelFormatError("unexpected aux section '" + name + "' for " + model.algo_name);
      }
      for (auto& row : it->second.rows) {
        next_line();
        read_row(line, row, line_no);
      }
    } else if (section.starts_with("scalar ")) {
      const std::string name = section.substr(7);
      auto it = model.scalars.find(name);
      if (it == model.scalars.end()) {
        throw ModelFormatError("unexpected scalar section '" + name + "' for " + model.algo_name);
      }
      next_line();
      std::istringstream values(line);
      for (auto& v : it->second) {
        std::string token;
        if (!(values >> token)) throw ModelFormatError("scalar '" + name + "' has too few values");
        try {
          v = parse_double(token);
        } catch (const ConfigError&) {
          throw ModelFormatError("scalar '" + name + "' has bad value '" + token + "'");
        }
      }
    } else {
      throw ModelFormatError("unknown section [" + section + "]");
    }
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line.front() != '[') {
        throw ModelFormatError("model line " + std::to_string(line_no) + ": unexpected data");
      }
      have_section = true;
      break;
    }
  }

  if (!seen.contains("weights")) throw ModelFormatError("model has no [weights] section");
  for (const auto& [name, array] : model.aux) {
    if (array.persistent && !seen.contains("aux " + name)) {
      throw ModelFormatError("model is missing aux section '" + name + "'");
    }
  }
  for (const auto& [name, values] : model.scalars) {
    if (!seen.contains("scalar " + name)) {
      throw ModelFormatError("model is missing scalar section '" + name + "'");
    }
  }
  model.algorithm().after_load(model);
  return model;
}

ModelState load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path.string());
  return load_model(in);
}

}  // namespace sol
