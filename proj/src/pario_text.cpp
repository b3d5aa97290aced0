#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <string>

#include "sol/error.hpp"
#include "sol/pario.hpp"

namespace sol {
namespace {

constexpr std::string_view kSpace = " \t\r\n\v\f";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kSpace);
  return s.substr(b, e - b + 1);
}

std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  return trim(line);
}

std::string quoted(std::string_view token) { return "'" + std::string(token) + "'"; }

bool parse_int64(std::string_view s, std::int64_t& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

bool parse_real(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec == std::errc::result_out_of_range && p == s.data() + s.size()) {
    // Underflow rounds toward zero; overflow is rejected.
    const std::string copy(s);
    out = std::strtod(copy.c_str(), nullptr);
    return std::isfinite(out);
  }
  return ec == std::errc{} && p == s.data() + s.size();
}

// Class labels: integral values; -1 is the negative binary class.
int parse_label(std::string_view token, std::uint64_t line_no) {
  double v = 0.0;
  if (!parse_real(token, v) || !std::isfinite(v) || std::floor(v) != v) {
    throw ParseError(line_no, "bad label " + quoted(token));
  }
  if (v == -1.0) return 0;
  if (v < 0.0 || v > static_cast<double>(std::numeric_limits<int>::max())) {
    throw ParseError(line_no, "label out of range " + quoted(token));
  }
  return static_cast<int>(v);
}

float parse_value(std::string_view token, std::uint64_t line_no) {
  double v = 0.0;
  if (!parse_real(token, v)) throw ParseError(line_no, "bad feature value " + quoted(token));
  const auto f = static_cast<float>(v);
  if (std::isinf(f) && !std::isinf(v)) {
    throw ParseError(line_no, "feature value out of range " + quoted(token));
  }
  return f;
}

template <typename Fn>
void for_each_token(std::string_view s, Fn&& fn) {
  std::size_t pos = 0;
  while (true) {
    pos = s.find_first_not_of(kSpace, pos);
    if (pos == std::string_view::npos) return;
    auto end = s.find_first_of(kSpace, pos);
    if (end == std::string_view::npos) end = s.size();
    fn(s.substr(pos, end - pos));
    pos = end;
  }
}

SparseVector build_vector(std::vector<FeatureId>& ids, std::vector<float>& vals,
                          std::vector<std::pair<std::int64_t, double>>& pairs, bool canonical,
                          std::uint64_t line_no) {
  if (canonical) return SparseVector(std::move(ids), std::move(vals));
  try {
    return sparse_from_pairs(pairs);
  } catch (const ParseError&) {
    throw;
  } catch (const FormatError& e) {
    throw ParseError(line_no, e.what());
  }
}

}  // namespace

std::string_view format_name(DataFormat format) {
  switch (format) {
    case DataFormat::kLibsvm: return "libsvm";
    case DataFormat::kCsv: return "csv";
    case DataFormat::kBinary: return "bin";
  }
  return "libsvm";
}

std::optional<DataFormat> parse_format(std::string_view name) {
  if (name == "libsvm" || name == "svm" || name == "txt") return DataFormat::kLibsvm;
  if (name == "csv") return DataFormat::kCsv;
  if (name == "bin" || name == "binary") return DataFormat::kBinary;
  return std::nullopt;
}

DataFormat infer_format(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".csv") return DataFormat::kCsv;
  if (ext == ".bin") return DataFormat::kBinary;
  return DataFormat::kLibsvm;
}

DataSource DataSource::from_path(std::filesystem::path path, std::optional<DataFormat> format,
                                 std::size_t class_count) {
  DataSource s;
  s.format = format ? *format : infer_format(path);
  s.path = std::move(path);
  s.class_count = class_count;
  return s;
}

bool is_blank_record(std::string_view line) { return strip_comment(line).empty(); }

std::optional<Example> parse_libsvm_record(std::string_view line, std::uint64_t line_no) {
  const auto body = strip_comment(line);
  if (body.empty()) return std::nullopt;

  Example ex;
  bool have_label = false;
  bool canonical = true;
  std::int64_t last = -1;
  std::vector<FeatureId> ids;
  std::vector<float> vals;
  std::vector<std::pair<std::int64_t, double>> pairs;

  for_each_token(body, [&](std::string_view token) {
    if (!have_label) {
      ex.label = parse_label(token, line_no);
      have_label = true;
      return;
    }
    const auto colon = token.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line_no, "expected index:value, got " + quoted(token));
    }
    std::int64_t index = 0;
    if (!parse_int64(token.substr(0, colon), index)) {
      throw ParseError(line_no, "bad feature index " + quoted(token));
    }
    if (index < 0) throw ParseError(line_no, "negative feature index " + quoted(token));
    if (index > std::numeric_limits<FeatureId>::max()) {
      throw ParseError(line_no, "feature index too large " + quoted(token));
    }
    const float value = parse_value(token.substr(colon + 1), line_no);
    pairs.emplace_back(index, value);
    if (!canonical) return;
    if (index <= last || value == 0.0f) {
      canonical = false;
      return;
    }
    last = index;
    ids.push_back(static_cast<FeatureId>(index));
    vals.push_back(value);
  });

  ex.features = build_vector(ids, vals, pairs, canonical, line_no);
  return ex;
}

Example parse_libsvm_line(std::string_view line, std::uint64_t line_no) {
  auto ex = parse_libsvm_record(line, line_no);
  if (!ex) throw ParseError(line_no, "empty record");
  return std::move(*ex);
}

std::string format_libsvm(const Example& example) {
  std::string out = std::to_string(example.label);
  const auto idx = example.features.indices();
  const auto val = example.features.values();
  char buf[64];
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out += ' ';
    out += std::to_string(idx[i]);
    out += ':';
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, val[i]);
    out.append(buf, p);
  }
  return out;
}

// ---- csv ----

namespace {

template <typename Fn>
std::size_t for_each_cell(std::string_view row, Fn&& fn) {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (true) {
    const auto comma = row.find(',', pos);
    const auto cell = row.substr(pos, comma == std::string_view::npos ? row.size() - pos
                                                                      : comma - pos);
    fn(n, trim(cell));
    ++n;
    if (comma == std::string_view::npos) return n;
    pos = comma + 1;
  }
}

}  // namespace

CsvLayout parse_csv_header(std::string_view header) {
  header = trim(header);
  if (header.empty()) throw ParseError(1, "missing csv header");
  CsvLayout layout;
  std::optional<std::size_t> label;
  layout.columns = for_each_cell(header, [&](std::size_t i, std::string_view cell) {
    std::string lower(cell);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!label && lower == "label") label = i;
  });
  layout.label_column = label.value_or(0);
  return layout;
}

Example parse_csv_row(std::string_view row, const CsvLayout& layout, std::uint64_t line_no) {
  Example ex;
  std::vector<FeatureId> ids;
  std::vector<float> vals;
  FeatureId next_id = 1;
  const auto n = for_each_cell(row, [&](std::size_t i, std::string_view cell) {
    if (i >= layout.columns) return;
    if (i == layout.label_column) {
      ex.label = parse_label(cell, line_no);
      return;
    }
    const FeatureId id = next_id++;
    const float v = parse_value(cell, line_no);
    if (v != 0.0f) {
      ids.push_back(id);
      vals.push_back(v);
    }
  });
  if (n != layout.columns) {
    throw ParseError(line_no, "row has " + std::to_string(n) + " columns, header has " +
                                  std::to_string(layout.columns));
  }
  ex.features = SparseVector(std::move(ids), std::move(vals));
  return ex;
}

std::vector<Example> parse_csv(std::istream& in) {
  std::string line;
  std::uint64_t line_no = 0;
  std::optional<CsvLayout> layout;
  std::vector<Example> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!layout) {
      layout = parse_csv_header(line);
      continue;
    }
    out.push_back(parse_csv_row(line, *layout, line_no));
  }
  if (!layout) throw ParseError(1, "missing csv header");
  return out;
}

}  // namespace sol
