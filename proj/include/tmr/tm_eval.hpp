#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tmr/embed.hpp"
#include "tmr/lexical.hpp"
#include "tmr/meteor.hpp"
#include "tmr/normalize.hpp"
#include "tmr/store.hpp"
#include "tmr/vector_index.hpp"

namespace tmr {

/// An incoming source segment and its actual translation.
struct EvalInput {
  std::string query;
  std::string reference;
};

/// Reads two line-aligned UTF-8 files, one segment per line. Throws
/// ParseError when the line counts differ or a line is not valid UTF-8.
std::vector<EvalInput> load_eval_inputs(const std::filesystem::path& inputs,
                                        const std::filesystem::path& refs);

struct EvalRow {
  std::string query;
  std::string reference;
  MatchResult lex_match;
  MatchResult emb_match;
  double lex_fuzzy = 0.0;
  double meteor_lex = 0.0;
  double meteor_emb = 0.0;
};

/// Retrieves the lexical best match and the embedding top-1 for every input
/// and scores both targets against the reference with METEOR. Rows come
/// back in input order for any thread count.
///
/// Throws EmptyMemoryError for an empty store or index.
std::vector<EvalRow> build_eval_rows(std::span<const EvalInput> inputs,
                                     const TranslationMemoryStore& store,
                                     const VectorIndex& index, EmbeddingProvider& provider,
                                     unsigned threads = 1,
                                     const meteor::MeteorParams& params = {});

/// Both methods retrieved the same unit, or units with identical targets.
bool is_tie(const EvalRow& row);

std::vector<EvalRow> drop_ties(std::vector<EvalRow> rows);

/// Bucket edges over the fuzzy score. Buckets are [e_i, e_i+1) except the
/// last, which is closed.
struct PartitionSpec {
  std::vector<double> edges{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

  /// Throws ArgumentError unless the edges strictly increase from 0 to 1.
  void validate() const;
  std::size_t buckets() const noexcept { return edges.size() - 1; }
  std::size_t bucket_of(double score) const;
  std::string label(std::size_t bucket) const;
};

struct BucketStats {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  std::optional<double> avg_meteor_lex;
  std::optional<double> avg_meteor_emb;
};

struct PartitionReport {
  std::vector<BucketStats> buckets;
  bool normalized = false;
  std::size_t rows_in = 0;
  std::size_t ties_dropped = 0;

  std::size_t retained() const noexcept { return rows_in - ties_dropped; }
};

/// Drops ties, buckets the remaining rows by lex_fuzzy and averages METEOR
/// per bucket. With `normalizer`, the reference and both retrieved targets
/// are normalized first, ties are judged on the normalized targets and
/// METEOR is recomputed on the normalized texts.
PartitionReport partition_and_average(std::span<const EvalRow> rows,
                                      const PartitionSpec& spec = {},
                                      const PlaceholderPipeline* normalizer = nullptr,
                                      const meteor::MeteorParams& params = {});

enum class StsMode { query_source, reference_target };
const char* to_string(StsMode m) noexcept;
StsMode parse_sts_mode(std::string_view name);

/// Mean cosine per bucket between the query and the embedding match's source
/// (query_source) or between the reference and that match's target
/// (reference_target). Empty buckets give nullopt.
std::vector<std::optional<double>> mean_sts_per_bucket(std::span<const EvalRow> rows,
                                                       EmbeddingProvider& provider,
                                                       const PartitionSpec& spec = {},
                                                       StsMode mode = StsMode::query_source);

struct TmEvalReport {
  PartitionReport partition;
  std::vector<std::optional<double>> mean_sts;
  StsMode sts_mode = StsMode::query_source;
  std::string provider;
};

std::string to_json(const TmEvalReport& report);
std::string to_table(const TmEvalReport& report);

}  // namespace tmr
