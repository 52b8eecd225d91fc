#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tmr/embed.hpp"

namespace tmr {

struct StsPair {
  std::string s1;
  std::string s2;
  double gold = 0.0;
  double lo = 1.0;
  double hi = 5.0;
};

struct StsMetrics {
  std::string method;
  double pearson = 0.0;
  double spearman = 0.0;
  double mse = 0.0;
  std::size_t n = 0;
};

enum class StsFormat { sick, tsv3 };

/// "sick" or "tsv3"; throws ArgumentError otherwise.
StsFormat parse_sts_format(std::string_view name);

/// sick: tab-separated with a header row naming sentence_A, sentence_B and
/// relatedness_score (other columns ignored). tsv3: s1<TAB>s2<TAB>score, no
/// header. Scores outside [lo, hi] or not numeric raise ParseError.
std::vector<StsPair> parse_sts(std::string_view content, StsFormat format, double lo = 1.0,
                               double hi = 5.0);
std::vector<StsPair> load_sts(const std::filesystem::path& path, StsFormat format,
                              double lo = 1.0, double hi = 5.0);

/// Product-moment correlation. Throws ArgumentError on a length mismatch,
/// fewer than two points, non-finite input or zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// 1-based ranks, ties sharing the average of their positions.
std::vector<double> average_ranks(std::span<const double> x);

/// Pearson over average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

/// Mean squared difference. Throws ArgumentError on a length mismatch or
/// empty input.
double mse(std::span<const double> pred, std::span<const double> gold);

/// Maps predictions linearly from [0, 1] onto [lo, hi].
std::vector<double> rescale_unit(std::span<const double> pred, double lo, double hi);

enum class StsMethod { embed_cosine, edit_minmax };
const char* to_string(StsMethod m) noexcept;
StsMethod parse_sts_method(std::string_view name);

/// Cosine of provider vectors for each pair.
std::vector<double> predict_embed_cosine(std::span<const StsPair> pairs,
                                         EmbeddingProvider& provider);

/// Levenshtein distance per pair, min-max scaled over the whole set.
std::vector<double> predict_edit_minmax(std::span<const StsPair> pairs, unsigned threads = 1);

/// Scores every pair and reports correlations against gold. MSE is taken
/// after mapping predictions from [0, 1] onto the gold scale of the first
/// pair. `provider` is required for embed_cosine.
StsMetrics evaluate_sts(std::span<const StsPair> pairs, StsMethod method,
                        EmbeddingProvider* provider = nullptr, unsigned threads = 1);

/// {"method":...,"pearson":...,"spearman":...,"mse":...,"n":...}
std::string to_json(const StsMetrics& m);

}  // namespace tmr
