#include "sol/sparse_vector.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "sol/error.hpp"

namespace sol {

SparseVector::SparseVector(std::vector<FeatureId> indices, std::vector<float> values)
    : indices_(std::move(indices)), values_(std::move(values)) {
  if (indices_.size() != values_.size()) {
    throw FormatError("sparse vector: index/value length mismatch");
  }
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i > 0 && indices_[i] <= indices_[i - 1]) {
      throw FormatError("sparse vector: indices not strictly increasing");
    }
    if (values_[i] == 0.0f) {
      throw FormatError("sparse vector: explicit zero at feature " +
                        std::to_string(indices_[i]));
    }
  }
}

double SparseVector::squared_norm() const {
  double sum = 0.0;
  for (float v : values_) sum += double{v} * double{v};
  return sum;
}

SparseVector SparseVector::with_bias() const {
  SparseVector out;
  out.indices_.reserve(indices_.size() + 1);
  out.values_.reserve(values_.size() + 1);
  out.indices_.push_back(kBiasFeature);
  out.values_.push_back(1.0f);
  std::size_t start = (!indices_.empty() && indices_.front() == kBiasFeature) ? 1 : 0;
  out.indices_.insert(out.indices_.end(), indices_.begin() + start, indices_.end());
  out.values_.insert(out.values_.end(), values_.begin() + start, values_.end());
  return out;
}

SparseVector sparse_from_pairs(std::span<const std::pair<std::int64_t, double>> pairs) {
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Stable sort keeps input order among duplicates so the last one can win.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pairs[a].first < pairs[b].first;
  });

  std::vector<FeatureId> indices;
  std::vector<float> values;
  indices.reserve(pairs.size());
  values.reserve(pairs.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& [index, value] = pairs[order[k]];
    if (index < 0) {
      throw FormatError("negative feature index " + std::to_string(index));
    }
    if (index > std::numeric_limits<FeatureId>::max()) {
      throw FormatError("feature index " + std::to_string(index) + " out of range");
    }
    if (k + 1 < order.size() && pairs[order[k + 1]].first == index) continue;
    const auto stored = static_cast<float>(value);
    if (stored == 0.0f) continue;
    indices.push_back(static_cast<FeatureId>(index));
    values.push_back(stored);
  }
  return SparseVector(std::move(indices), std::move(values));
}

double dot(std::span<const double> w, const SparseVector& x) {
  const auto idx = x.indices();
  const auto val = x.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < w.size()) sum += w[idx[i]] * double{val[i]};
  }
  return sum;
}

}  // namespace sol
