#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tmr {

/// Fixed-dimension sentence representation. Values are held in double
/// precision; the on-disk store and the search index keep single precision.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  /// Throws ArgumentError when `values` is empty or holds a non-finite value.
  explicit EmbeddingVector(std::vector<double> values);

  static EmbeddingVector from_floats(std::span<const float> values);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double norm() const noexcept;
  bool is_zero() const noexcept;

  bool operator==(const EmbeddingVector&) const = default;

 private:
  std::vector<double> values_;
};

}  // namespace tmr
