#pragma once

#include <map>
#include <string>
#include <string_view>

namespace sol {

// Named scalar hyperparameters. Ordered so serialization is deterministic.
class HyperParams {
 public:
  HyperParams() = default;

  void set(std::string name, double value) { values_[std::move(name)] = value; }
  bool contains(std::string_view name) const { return values_.find(name) != values_.end(); }

  // Throws ConfigError when the name is missing.
  double get(std::string_view name) const;
  double get_or(std::string_view name, double fallback) const;

  const std::map<std::string, double, std::less<>>& values() const { return values_; }

  // "eta=1;power_t=0" with shortest round-trip numbers.
  std::string to_string(char separator = ';') const;

  // Parses "k=v[<sep>k=v...]"; whitespace around tokens is ignored. Values
  // accept "inf". Later keys override earlier ones.
  static HyperParams parse(std::string_view text, char separator);

  // Adds every entry of other, overriding existing names.
  void merge(const HyperParams& other);

  friend bool operator==(const HyperParams&, const HyperParams&) = default;

 private:
  std::map<std::string, double, std::less<>> values_;
};

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

// Strict full-string parse; throws ConfigError on malformed input.
double parse_double(std::string_view text);

}  // namespace sol
