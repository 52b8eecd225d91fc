#pragma once

#include <cstddef>
#include <span>
#include <unordered_set>
#include <vector>

#include "tmr/store.hpp"

namespace tmr {

struct Neighbor {
  UnitId id = 0;
  double similarity = 0.0;

  bool operator==(const Neighbor&) const = default;
};

/// Exact cosine k-nearest-neighbour index over single-precision rows.
///
/// Rows are stored as float32, the on-disk precision. Queries are rounded to
/// float32 before scoring so that a query equal to a stored vector scores
/// exactly 1.0; dot products accumulate in double. Results are ordered by
/// similarity descending, then id ascending, independent of thread count.
class VectorIndex {
 public:
  explicit VectorIndex(std::size_t dim);

  /// Indexes every record of `store` that carries a vector.
  static VectorIndex from_store(const TranslationMemoryStore& store);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  std::span<const UnitId> ids() const noexcept { return ids_; }
  std::span<const float> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }

  /// Appends every record or none. Throws ArgumentError for a record without
  /// a vector, DimensionError for a wrong-length vector, ConflictError for an
  /// id already present, DegenerateVectorError for a zero vector.
  std::size_t add(std::span<const MemoryRecord> records);

  /// Raw append used by benchmarks; same checks as add().
  void add_row(UnitId id, std::span<const float> values);

  void reserve(std::size_t rows);

  /// Exact top-k by cosine. Returns min(k, size()) neighbours.
  ///
  /// Throws EmptyIndexError, DimensionError, DegenerateVectorError for a
  /// zero query, ArgumentError when k == 0.
  std::vector<Neighbor> nearest(const EmbeddingVector& query, std::size_t k,
                                unsigned threads = 1) const;

 private:
  std::size_t dim_;
  std::vector<UnitId> ids_;
  std::vector<float> data_;
  std::vector<double> sq_norms_;
  std::unordered_set<UnitId> id_set_;
};

std::size_t index_add(VectorIndex& index, std::span<const MemoryRecord> records);

std::vector<Neighbor> get_nearest(const VectorIndex& index, const EmbeddingVector& query,
                                  std::size_t k, unsigned threads = 1);

}  // namespace tmr
