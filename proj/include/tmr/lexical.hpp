#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tmr/store.hpp"

namespace tmr {

enum class MatchMethod { lexical, embedding };

const char* to_string(MatchMethod m) noexcept;

struct MatchResult {
  TranslationUnit unit;
  double score = 0.0;  // in [0, 1]
  MatchMethod method = MatchMethod::lexical;
};

/// Lower bound of the fuzzy band. Scores of exactly 1.0 are exact matches.
struct FuzzyThresholds {
  double fuzzy_low = 0.70;

  /// Throws ArgumentError unless 0 < fuzzy_low < 1.
  void validate() const;
};

enum class MatchClass { exact, fuzzy, no_match };

const char* to_string(MatchClass c) noexcept;

/// Unit-cost insert/delete/substitute distance over unicode scalar values.
std::size_t levenshtein(std::string_view a, std::string_view b);
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// 1 - levenshtein(a, b) / max(|a|, |b|), lengths in scalar values. Two empty
/// strings score 1.0.
double fuzzy_score(std::string_view a, std::string_view b);
double fuzzy_score(std::u32string_view a, std::u32string_view b);

/// Negates the distances and min-max scales them onto [0, 1] over the whole
/// list: the smallest distance maps to 1, the largest to 0. If every distance
/// is equal, every output is 1.0. Throws ArgumentError on an empty list.
std::vector<double> minmax_similarity(std::span<const std::size_t> distances);

/// Exhaustive scan for the unit whose source maximises fuzzy_score against
/// `query`; ties go to the lowest id. `threads` > 1 splits the scan into
/// contiguous slices with a deterministic merge.
///
/// Throws EmptyMemoryError when the store holds no records.
MatchResult best_lexical_match(std::string_view query,
                               const TranslationMemoryStore& store,
                               unsigned threads = 1);

/// The `k` best units by fuzzy score, descending, ties by lower id.
std::vector<MatchResult> top_lexical_matches(std::string_view query,
                                             const TranslationMemoryStore& store,
                                             std::size_t k);

MatchClass classify_match(double score, const FuzzyThresholds& thresholds = {});

}  // namespace tmr
