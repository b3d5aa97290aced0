#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace sol {

using FeatureId = std::uint32_t;

// Feature id 0 is reserved for the implicit bias feature.
inline constexpr FeatureId kBiasFeature = 0;

// A d-dimensional example with few nonzeros. Indices are strictly increasing
// and no stored value is exactly zero. Feature values are carried at 32-bit
// precision (the same precision as the binary cache); arithmetic on them is
// done in double.
class SparseVector {
 public:
  SparseVector() = default;

  // Takes already-canonical storage; throws FormatError if it is not.
  SparseVector(std::vector<FeatureId> indices, std::vector<float> values);

  std::span<const FeatureId> indices() const { return indices_; }
  std::span<const float> values() const { return values_; }
  std::size_t nnz() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }

  // One past the largest feature id, 0 when empty.
  std::size_t dimension() const {
    return indices_.empty() ? 0 : std::size_t{indices_.back()} + 1;
  }

  double squared_norm() const;

  // Copy with feature 0 set to 1.0 (overriding any stored feature 0).
  SparseVector with_bias() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<FeatureId> indices_;
  std::vector<float> values_;
};

// Canonicalizes arbitrary (index, value) pairs: sorted, later duplicates win,
// zeros dropped. Negative or out-of-range indices throw FormatError.
SparseVector sparse_from_pairs(std::span<const std::pair<std::int64_t, double>> pairs);

// Sum of w[i] * x[i]; ids at or beyond w.size() read as zero.
double dot(std::span<const double> w, const SparseVector& x);

struct Example {
  SparseVector features;
  int label = 0;

  friend bool operator==(const Example&, const Example&) = default;
};

// Binary learners see class 1 as +1 and class 0 as -1.
inline double binary_sign(int label) { return label == 1 ? 1.0 : -1.0; }

struct DataChunk {
  std::uint64_t sequence_id = 0;
  std::vector<Example> examples;
};

}  // namespace sol
