#include "tmr/vector_index.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <thread>

#include "tmr/error.hpp"

namespace tmr {

namespace {

// Products of two floats are exact in double; only the sums round. The four
// partial sums fix the summation order, so the same pair always yields the
// same bits.
double dot_f32(const float* a, const float* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    s1 += static_cast<double>(a[i + 1]) * static_cast<double>(b[i + 1]);
    s2 += static_cast<double>(a[i + 2]) * static_cast<double>(b[i + 2]);
    s3 += static_cast<double>(a[i + 3]) * static_cast<double>(b[i + 3]);
  }
  for (; i < n; ++i) s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return (s0 + s1) + (s2 + s3);
}

bool ranks_before(const Neighbor& a, const Neighbor& b) {
  return a.similarity != b.similarity ? a.similarity > b.similarity : a.id < b.id;
}

struct WorstOnTop {
  bool operator()(const Neighbor& a, const Neighbor& b) const { return ranks_before(a, b); }
};

using TopK = std::priority_queue<Neighbor, std::vector<Neighbor>, WorstOnTop>;

void scan_rows(std::span<const float> q, double q_sq, const std::vector<float>& data,
               const std::vector<double>& sq_norms, std::span<const UnitId> ids,
               std::size_t begin, std::size_t end, std::size_t k, TopK& heap) {
  const std::size_t dim = q.size();
  for (std::size_t i = begin; i < end; ++i) {
    const double dot = dot_f32(q.data(), data.data() + i * dim, dim);
    const double sim = std::clamp(dot / std::sqrt(q_sq * sq_norms[i]), -1.0, 1.0);
    const Neighbor cand{ids[i], sim};
    if (heap.size() < k) {
      heap.push(cand);
    } else if (ranks_before(cand, heap.top())) {
      heap.pop();
      heap.push(cand);
    }
  }
}

}  // namespace

VectorIndex::VectorIndex(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ArgumentError("index dimension must be positive");
}

VectorIndex VectorIndex::from_store(const TranslationMemoryStore& store) {
  VectorIndex index(store.dim());
  store.read([&](std::span<const MemoryRecord> records) {
    std::vector<MemoryRecord> with_vectors;
    for (const auto& r : records) {
      if (r.vector) with_vectors.push_back(r);
    }
    index.add(with_vectors);
  });
  return index;
}

void VectorIndex::reserve(std::size_t rows) {
  ids_.reserve(rows);
  data_.reserve(rows * dim_);
  sq_norms_.reserve(rows);
  id_set_.reserve(rows);
}

void VectorIndex::add_row(UnitId id, std::span<const float> values) {
  if (values.size() != dim_) throw DimensionError(dim_, values.size());
  if (id_set_.count(id)) throw ConflictError("id " + std::to_string(id) + " already indexed");
  for (float v : values) {
    if (!std::isfinite(v)) throw ArgumentError("non-finite vector component");
  }
  const double sq = dot_f32(values.data(), values.data(), dim_);
  if (sq == 0.0) throw DegenerateVectorError("zero vector for id " + std::to_string(id));
  ids_.push_back(id);
  id_set_.insert(id);
  data_.insert(data_.end(), values.begin(), values.end());
  sq_norms_.push_back(sq);
}

std::size_t VectorIndex::add(std::span<const MemoryRecord> records) {
  std::unordered_set<UnitId> batch_ids;
  std::vector<float> rows;
  rows.reserve(records.size() * dim_);
  for (const auto& r : records) {
    if (!r.vector) {
      throw ArgumentError("record " + std::to_string(r.unit.id) + " has no vector");
    }
    if (r.vector->dim() != dim_) throw DimensionError(dim_, r.vector->dim());
    if (id_set_.count(r.unit.id) || !batch_ids.insert(r.unit.id).second) {
      throw ConflictError("id " + std::to_string(r.unit.id) + " already indexed");
    }
    double sq = 0.0;
    for (double v : r.vector->values()) {
      const auto f = static_cast<float>(v);
      rows.push_back(f);
      sq += static_cast<double>(f) * f;
    }
    if (sq == 0.0) {
      throw DegenerateVectorError("zero vector for id " + std::to_string(r.unit.id));
    }
  }
  reserve(size() + records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    add_row(records[i].unit.id, std::span<const float>(rows.data() + i * dim_, dim_));
  }
  return records.size();
}

std::vector<Neighbor> VectorIndex::nearest(const EmbeddingVector& query, std::size_t k,
                                           unsigned threads) const {
  if (k == 0) throw ArgumentError("k must be at least 1");
  if (empty()) throw EmptyIndexError("vector index is empty");
  if (query.dim() != dim_) throw DimensionError(dim_, query.dim());
  std::vector<float> q(dim_);
  for (std::size_t i = 0; i < dim_; ++i) q[i] = static_cast<float>(query[i]);
  const double q_sq = dot_f32(q.data(), q.data(), dim_);
  if (q_sq == 0.0) throw DegenerateVectorError("zero query vector");

  const std::size_t n = size();
  const std::size_t keep = std::min(k, n);
  const std::size_t workers =
      std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, n / 4096));
  std::vector<TopK> heaps(workers);
  if (workers == 1) {
    scan_rows(q, q_sq, data_, sq_norms_, ids_, 0, n, keep, heaps[0]);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        scan_rows(q, q_sq, data_, sq_norms_, ids_, n * w / workers, n * (w + 1) / workers, keep,
                  heaps[w]);
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<Neighbor> out;
  out.reserve(keep * workers);
  for (auto& heap : heaps) {
    while (!heap.empty()) {
      out.push_back(heap.top());
      heap.pop();
    }
  }
  std::sort(out.begin(), out.end(), ranks_before);
  out.resize(keep);
  return out;
}

std::size_t index_add(VectorIndex& index, std::span<const MemoryRecord> records) {
  return index.add(records);
}

std::vector<Neighbor> get_nearest(const VectorIndex& index, const EmbeddingVector& query,
                                  std::size_t k, unsigned threads) {
  return index.nearest(query, k, threads);
}

}  // namespace tmr
