#include "sol/algorithm.hpp"

#include "registry.hpp"

namespace sol {

namespace {

const std::vector<const Algorithm*>& registry() {
  static const std::vector<const Algorithm*> all = [] {
    std::vector<const Algorithm*> out = first_order_learners();
    for (auto* a : second_order_learners()) out.push_back(a);
    for (auto* a : sparse_learners()) out.push_back(a);
    return out;
  }();
  return all;
}

}  // namespace

const Algorithm* find_algorithm(std::string_view name) {
  for (const auto* algo : registry()) {
    if (algo->name() == name) return algo;
  }
  return nullptr;
}

std::span<const Algorithm* const> all_algorithms() { return registry(); }

std::string algorithm_names(std::string_view separator) {
  std::string out;
  for (const auto* algo : registry()) {
    if (!out.empty()) out += separator;
    out += algo->name();
  }
  return out;
}

}  // namespace sol
