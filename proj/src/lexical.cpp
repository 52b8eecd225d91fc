#include "tmr/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "tmr/error.hpp"
#include "tmr/text.hpp"

namespace tmr {

namespace {

// Distance with an abandon threshold: returns a value > limit as soon as
// every cell of a DP row exceeds it (row minima never decrease).
std::size_t bounded_levenshtein(std::u32string_view a, std::u32string_view b,
                                std::size_t limit, std::vector<std::size_t>& row) {
  if (a.size() < b.size()) std::swap(a, b);
  const std::size_t m = b.size();
  row.resize(m + 1);
  for (std::size_t j = 0; j <= m; ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    std::size_t row_min = row[0];
    const char32_t ca = a[i - 1];
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t up = row[j];
      const std::size_t cost = diag + (ca == b[j - 1] ? 0 : 1);
      row[j] = std::min({cost, up + 1, row[j - 1] + 1});
      diag = up;
      row_min = std::min(row_min, row[j]);
    }
    if (row_min > limit) return row_min;
  }
  return row[m];
}

double score_from_distance(std::size_t distance, std::size_t la, std::size_t lb) {
  const std::size_t longest = std::max(la, lb);
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(distance) / static_cast<double>(longest);
}

struct Candidate {
  std::size_t index = 0;
  double score = -1.0;
};

// Best candidate within records[begin, end): strictly greater score wins, so
// the earliest (lowest id) record keeps ties.
Candidate scan_slice(const std::u32string& query, std::span<const MemoryRecord> records,
                     std::size_t begin, std::size_t end) {
  Candidate best;
  std::vector<std::size_t> row;
  std::u32string source;
  for (std::size_t i = begin; i < end; ++i) {
    source = text::decode_utf8(records[i].unit.source_text);
    const std::size_t longest = std::max(query.size(), source.size());
    if (best.score >= 0.0 && longest > 0) {
      const std::size_t gap = query.size() > source.size() ? query.size() - source.size()
                                                           : source.size() - query.size();
      if (score_from_distance(gap, query.size(), source.size()) <= best.score) continue;
    }
    std::size_t limit = std::numeric_limits<std::size_t>::max();
    if (best.score >= 0.0) {
      limit = static_cast<std::size_t>(std::ceil((1.0 - best.score) * static_cast<double>(longest))) + 1;
    }
    const std::size_t d = bounded_levenshtein(query, source, limit, row);
    if (d > limit) continue;
    const double s = score_from_distance(d, query.size(), source.size());
    if (s > best.score) {
      best.index = i;
      best.score = s;
      if (s == 1.0) break;
    }
  }
  return best;
}

}  // namespace

const char* to_string(MatchMethod m) noexcept {
  return m == MatchMethod::lexical ? "lexical" : "embedding";
}

const char* to_string(MatchClass c) noexcept {
  switch (c) {
    case MatchClass::exact: return "exact";
    case MatchClass::fuzzy: return "fuzzy";
    case MatchClass::no_match: return "no_match";
  }
  return "unknown";
}

void FuzzyThresholds::validate() const {
  if (!(fuzzy_low > 0.0 && fuzzy_low < 1.0)) {
    throw ArgumentError("fuzzy_low must lie strictly between 0 and 1");
  }
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> row;
  return bounded_levenshtein(a, b, std::numeric_limits<std::size_t>::max(), row);
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(text::decode_utf8(a), text::decode_utf8(b));
}

double fuzzy_score(std::u32string_view a, std::u32string_view b) {
  return score_from_distance(levenshtein(a, b), a.size(), b.size());
}

double fuzzy_score(std::string_view a, std::string_view b) {
  return fuzzy_score(text::decode_utf8(a), text::decode_utf8(b));
}

std::vector<double> minmax_similarity(std::span<const std::size_t> distances) {
  if (distances.empty()) throw ArgumentError("minmax_similarity: empty input");
  const auto [lo_it, hi_it] = std::minmax_element(distances.begin(), distances.end());
  const double lo = static_cast<double>(*lo_it);
  const double hi = static_cast<double>(*hi_it);
  std::vector<double> out(distances.size(), 1.0);
  if (hi == lo) return out;
  // Negated distance -d ranges over [-hi, -lo]; scale that onto [0, 1].
  for (std::size_t i = 0; i < distances.size(); ++i) {
    out[i] = (hi - static_cast<double>(distances[i])) / (hi - lo);
  }
  return out;
}

MatchResult best_lexical_match(std::string_view query,
                               const TranslationMemoryStore& store,
                               unsigned threads) {
  const std::u32string q = text::decode_utf8(query);
  MatchResult result;
  store.read([&](std::span<const MemoryRecord> records) {
    if (records.empty()) throw EmptyMemoryError("translation memory is empty");
    const std::size_t n = records.size();
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, n / 64));
    Candidate best;
    if (workers == 1) {
      best = scan_slice(q, records, 0, n);
    } else {
      std::vector<Candidate> partial(workers);
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          partial[w] = scan_slice(q, records, n * w / workers, n * (w + 1) / workers);
        });
      }
      for (auto& t : pool) t.join();
      // Slices are in id order, so the first slice holding the maximum wins.
      for (const auto& c : partial) {
        if (c.score > best.score) best = c;
      }
    }
    result.unit = records[best.index].unit;
    result.score = best.score;
  });
  result.method = MatchMethod::lexical;
  return result;
}

std::vector<MatchResult> top_lexical_matches(std::string_view query,
                                             const TranslationMemoryStore& store,
                                             std::size_t k) {
  if (k == 0) throw ArgumentError("k must be at least 1");
  const std::u32string q = text::decode_utf8(query);
  std::vector<MatchResult> out;
  store.read([&](std::span<const MemoryRecord> records) {
    if (records.empty()) throw EmptyMemoryError("translation memory is empty");
    std::vector<Candidate> scored;
    scored.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      scored.push_back({i, fuzzy_score(q, text::decode_utf8(records[i].unit.source_text))});
    }
    const std::size_t keep = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                      scored.end(), [](const Candidate& a, const Candidate& b) {
                        return a.score != b.score ? a.score > b.score : a.index < b.index;
                      });
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
      out.push_back({records[scored[i].index].unit, scored[i].score, MatchMethod::lexical});
    }
  });
  return out;
}

MatchClass classify_match(double score, const FuzzyThresholds& thresholds) {
  if (score >= 1.0) return MatchClass::exact;
  if (score >= thresholds.fuzzy_low) return MatchClass::fuzzy;
  return MatchClass::no_match;
}

}  // namespace tmr
