#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sol/algorithm.hpp"
#include "sol/error.hpp"
#include "sol/model.hpp"

namespace sol::detail {

// w += coef * x
inline void add_scaled(GrowableArray& w, const SparseVector& x, double coef) {
  const auto idx = x.indices();
  const auto val = x.values();
  if (idx.empty()) return;
  w.resize(std::size_t{idx.back()} + 1);
  auto data = w.view();
  for (std::size_t i = 0; i < idx.size(); ++i) data[idx[i]] += coef * double{val[i]};
}

// eta / t^power_t, with the two common schedules evaluated exactly.
inline double learning_rate(double eta, std::uint64_t t, double power_t) {
  if (power_t == 0.0) return eta;
  const auto td = static_cast<double>(t);
  if (power_t == 0.5) return eta / std::sqrt(td);
  if (power_t == 1.0) return eta / td;
  return eta / std::pow(td, power_t);
}

// Resizes every row of an array to cover x.
inline void cover(GrowableArray& row, const SparseVector& x) {
  if (!x.empty()) row.resize(std::size_t{x.indices().back()} + 1);
}

inline void require(bool ok, const char* message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace sol::detail
