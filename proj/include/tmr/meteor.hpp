#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tmr::meteor {

/// Original METEOR constants.
struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;

  /// Throws ArgumentError unless alpha, gamma in [0, 1] and beta > 0.
  void validate() const;
};

struct Alignment {
  std::size_t matches = 0;
  std::size_t chunks = 0;
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  /// False only when the chunk search hit its node budget; `chunks` is then
  /// the best value found rather than a proven minimum.
  bool optimal = true;
};

/// Lowercases, splits on whitespace and emits each punctuation character as
/// its own token. Punctuation is ASCII punctuation plus ¡ ¿ « » “ ” ‘ ’ …
/// – — and the middle dot.
std::vector<std::string> tokenize(std::string_view text);

/// One-to-one exact unigram alignment that first maximises the number of
/// matched tokens, then minimises the number of chunks (runs of matches that
/// are contiguous and in the same order on both sides).
Alignment align_exact(const std::vector<std::string>& hyp,
                      const std::vector<std::string>& ref);

/// Sentence-level METEOR with the exact matcher only:
///   P = m / |hyp|, R = m / |ref|, Fmean = P R / (alpha P + (1 - alpha) R),
///   penalty = gamma (chunks / m)^beta, score = Fmean (1 - penalty).
/// No matches gives 0; two empty strings give 1.
double meteor_score(std::string_view hyp, std::string_view ref, const MeteorParams& params = {});

double score_alignment(const Alignment& a, const MeteorParams& params = {});

}  // namespace tmr::meteor
