#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <vector>

#include "tmr/tm_core.hpp"

namespace tmr {

struct StoreMetadata {
  LanguagePair languages;
  std::int64_t created_unix = 0;

  bool operator==(const StoreMetadata& o) const {
    return languages.source == o.languages.source &&
           languages.target == o.languages.target &&
           created_unix == o.created_unix;
  }
};

/// Ordered collection of MemoryRecords with a fixed vector dimension,
/// persisted as a single file (layout in docs/formats.md).
///
/// One writer or many concurrent readers: mutating calls take an exclusive
/// lock, lookups a shared one, so a reader never observes a half-applied put.
class TranslationMemoryStore {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  explicit TranslationMemoryStore(std::size_t dim, StoreMetadata metadata = {});

  TranslationMemoryStore(TranslationMemoryStore&&) noexcept;
  TranslationMemoryStore& operator=(TranslationMemoryStore&&) noexcept;
  TranslationMemoryStore(const TranslationMemoryStore&) = delete;
  TranslationMemoryStore& operator=(const TranslationMemoryStore&) = delete;
  ~TranslationMemoryStore();

  std::size_t dim() const noexcept { return dim_; }
  const StoreMetadata& metadata() const noexcept { return metadata_; }
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  /// Appends a record. Ids must be strictly increasing (ConflictError);
  /// a present vector must have `dim()` components (DimensionError).
  void put(MemoryRecord record);

  /// Attaches or replaces the vector of an existing record.
  void set_vector(UnitId id, EmbeddingVector vector);

  std::optional<MemoryRecord> get(UnitId id) const;

  /// Visits records in id order under a shared lock.
  void scan(const std::function<void(const MemoryRecord&)>& visit) const;

  /// Runs `fn` over the contiguous record array under a shared lock.
  void read(const std::function<void(std::span<const MemoryRecord>)>& fn) const;

  /// Snapshot of all records in id order.
  std::vector<MemoryRecord> records() const;

  /// Writes to a sibling temporary file and renames it into place, so a
  /// concurrent open() sees either the old or the new file.
  void save(const std::filesystem::path& path) const;

  static TranslationMemoryStore open(const std::filesystem::path& path);

 private:
  std::size_t dim_;
  StoreMetadata metadata_;
  std::vector<MemoryRecord> records_;
  std::unique_ptr<std::shared_mutex> mutex_;

  std::size_t find_index(UnitId id) const;
};

/// Builds a store from loaded units without vectors, in id order. Throws
/// ConflictError on a repeated id.
TranslationMemoryStore make_store(const std::vector<TranslationUnit>& units,
                                  std::size_t dim, StoreMetadata metadata = {});

}  // namespace tmr
