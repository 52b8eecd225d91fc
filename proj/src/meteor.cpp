#include "tmr/meteor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "tmr/error.hpp"
#include "tmr/text.hpp"

namespace tmr::meteor {

namespace {

constexpr std::size_t kNodeBudget = 200000;
constexpr int kUnmatched = -1;

// Branch and bound over hyp positions, left to right. Each position is either
// matched to a free ref position holding the same token or, when its type has
// spare hyp occurrences, left unmatched. Every type ends up matched
// min(hyp count, ref count) times, which is the maximum.
class ChunkSearch {
 public:
  ChunkSearch(std::vector<int> hyp, std::vector<int> ref, std::size_t types)
      : hyp_(std::move(hyp)), ref_(std::move(ref)) {
    const std::size_t n = hyp_.size();
    std::vector<std::size_t> hyp_count(types, 0), ref_count(types, 0);
    for (int t : hyp_) ++hyp_count[t];
    for (int t : ref_) ++ref_count[t];
    slack_.resize(types);
    need_.resize(types);
    for (std::size_t t = 0; t < types; ++t) {
      need_[t] = std::min(hyp_count[t], ref_count[t]);
      slack_[t] = hyp_count[t] - need_[t];
      matches_ += need_[t];
    }
    ref_positions_.resize(types);
    for (std::size_t j = 0; j < ref_.size(); ++j) ref_positions_[ref_[j]].push_back(static_cast<int>(j));

    // must_start[p]: position p is always matched and no ref bigram can
    // continue a chunk into it, so it opens a chunk in every solution.
    std::vector<std::pair<int, int>> ref_bigrams;
    for (std::size_t j = 1; j < ref_.size(); ++j) ref_bigrams.emplace_back(ref_[j - 1], ref_[j]);
    std::sort(ref_bigrams.begin(), ref_bigrams.end());
    suffix_bound_.assign(n + 1, 0);
    for (std::size_t p = n; p-- > 0;) {
      const int t = hyp_[p];
      const bool always_matched = need_[t] > 0 && slack_[t] == 0;
      bool continuable = false;
      if (p > 0) {
        continuable = std::binary_search(ref_bigrams.begin(), ref_bigrams.end(),
                                         std::make_pair(hyp_[p - 1], t));
      }
      suffix_bound_[p] = suffix_bound_[p + 1] + ((always_matched && !continuable) ? 1 : 0);
    }
    used_.assign(ref_.size(), false);
    match_.assign(n, kUnmatched);
  }

  std::size_t matches() const { return matches_; }

  std::pair<std::size_t, bool> solve() {
    if (matches_ == 0) return {0, true};
    best_ = std::numeric_limits<std::size_t>::max();
    visit(0, 0);
    return {best_, nodes_ <= kNodeBudget};
  }

 private:
  void visit(std::size_t i, std::size_t chunks) {
    if (++nodes_ > kNodeBudget && best_ != std::numeric_limits<std::size_t>::max()) return;
    if (chunks + suffix_bound_[i] >= best_) return;
    if (i == hyp_.size()) {
      best_ = chunks;
      return;
    }
    const int t = hyp_[i];
    const int prev = i > 0 ? match_[i - 1] : kUnmatched;

    if (need_[t] > 0) {
      // Continuation of the current chunk first, then positions that can
      // start a run with the next hyp token, then the rest.
      candidates_scratch_.clear();
      for (int j : ref_positions_[t]) {
        if (used_[j]) continue;
        int rank = 2;
        if (prev != kUnmatched && j == prev + 1) {
          rank = 0;
        } else if (i + 1 < hyp_.size() && static_cast<std::size_t>(j) + 1 < ref_.size() &&
                   ref_[j + 1] == hyp_[i + 1] && !used_[j + 1]) {
          rank = 1;
        }
        candidates_scratch_.emplace_back(rank, j);
      }
      std::sort(candidates_scratch_.begin(), candidates_scratch_.end());
      const auto candidates = candidates_scratch_;
      for (const auto& [rank, j] : candidates) {
        const bool opens = !(prev != kUnmatched && j == prev + 1);
        used_[j] = true;
        match_[i] = j;
        --need_[t];
        visit(i + 1, chunks + (opens ? 1 : 0));
        ++need_[t];
        match_[i] = kUnmatched;
        used_[j] = false;
        if (nodes_ > kNodeBudget) return;
      }
    }
    if (slack_[t] > 0) {
      --slack_[t];
      visit(i + 1, chunks);
      ++slack_[t];
    }
  }

  std::vector<int> hyp_;
  std::vector<int> ref_;
  std::vector<std::size_t> need_;
  std::vector<std::size_t> slack_;
  std::vector<std::vector<int>> ref_positions_;
  std::vector<std::size_t> suffix_bound_;
  std::vector<bool> used_;
  std::vector<int> match_;
  std::vector<std::pair<int, int>> candidates_scratch_;
  std::size_t matches_ = 0;
  std::size_t best_ = 0;
  std::size_t nodes_ = 0;
};

}  // namespace

void MeteorParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must be in [0, 1]");
  if (!(beta > 0.0)) throw ArgumentError("beta must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ArgumentError("gamma must be in [0, 1]");
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::u32string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(text::encode_utf8(current));
      current.clear();
    }
  };
  for (char32_t c : text::decode_utf8(text)) {
    if (text::is_space(c)) {
      flush();
    } else if (text::is_punctuation(c)) {
      flush();
      tokens.push_back(text::encode_utf8(std::u32string(1, c)));
    } else {
      current.push_back(text::to_lower(c));
    }
  }
  flush();
  return tokens;
}

Alignment align_exact(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
  Alignment a;
  a.hyp_len = hyp.size();
  a.ref_len = ref.size();
  std::unordered_map<std::string_view, int> ids;
  auto intern = [&](const std::string& s) {
    const auto [it, inserted] = ids.try_emplace(s, static_cast<int>(ids.size()));
    return it->second;
  };
  std::vector<int> h, r;
  h.reserve(hyp.size());
  r.reserve(ref.size());
  for (const auto& s : hyp) h.push_back(intern(s));
  for (const auto& s : ref) r.push_back(intern(s));

  ChunkSearch search(std::move(h), std::move(r), ids.size());
  a.matches = search.matches();
  const auto [chunks, optimal] = search.solve();
  a.chunks = chunks;
  a.optimal = optimal;
  return a;
}

double score_alignment(const Alignment& a, const MeteorParams& params) {
  if (a.hyp_len == 0 && a.ref_len == 0) return 1.0;
  if (a.matches == 0) return 0.0;
  const double m = static_cast<double>(a.matches);
  const double precision = m / static_cast<double>(a.hyp_len);
  const double recall = m / static_cast<double>(a.ref_len);
  const double fmean =
      precision * recall / (params.alpha * precision + (1.0 - params.alpha) * recall);
  const double penalty = params.gamma * std::pow(static_cast<double>(a.chunks) / m, params.beta);
  return std::clamp(fmean * (1.0 - penalty), 0.0, 1.0);
}

double meteor_score(std::string_view hyp, std::string_view ref, const MeteorParams& params) {
  params.validate();
  return score_alignment(align_exact(tokenize(hyp), tokenize(ref)), params);
}

}  // namespace tmr::meteor
