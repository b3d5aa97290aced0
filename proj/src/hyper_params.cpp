#include "sol/hyper_params.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <system_error>

#include "sol/error.hpp"

namespace sol {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

double HyperParams::get(std::string_view name) const {
  auto it = values_.find(name);
  if (it == values_.end()) {
    throw ConfigError("missing hyperparameter '" + std::string(name) + "'");
  }
  return it->second;
}

double HyperParams::get_or(std::string_view name, double fallback) const {
  auto it = values_.find(name);
  return it == values_.end() ? fallback : it->second;
}

std::string HyperParams::to_string(char separator) const {
  std::string out;
  for (const auto& [name, value] : values_) {
    if (!out.empty()) out += separator;
    out += name;
    out += '=';
    out += format_double(value);
  }
  return out;
}

HyperParams HyperParams::parse(std::string_view text, char separator) {
  HyperParams params;
  while (!text.empty()) {
    auto cut = text.find(separator);
    auto item = trim(text.substr(0, cut));
    text = cut == std::string_view::npos ? std::string_view{} : text.substr(cut + 1);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected name=value, got '" + std::string(item) + "'");
    }
    auto name = trim(item.substr(0, eq));
    if (name.empty()) {
      throw ConfigError("empty parameter name in '" + std::string(item) + "'");
    }
    params.set(std::string(name), parse_double(trim(item.substr(eq + 1))));
  }
  return params;
}

void HyperParams::merge(const HyperParams& other) {
  for (const auto& [name, value] : other.values_) values_[name] = value;
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ConfigError("malformed number '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace sol
