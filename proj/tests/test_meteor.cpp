#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tmr/error.hpp"
#include "tmr/meteor.hpp"

using namespace tmr::meteor;

using Tokens = std::vector<std::string>;

TEST(Tokenize, Rules) {
  EXPECT_EQ(tokenize("Hola, mundo."), (Tokens{"hola", ",", "mundo", "."}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("  a   b "), (Tokens{"a", "b"}));
  EXPECT_EQ(tokenize("¿Qué TAL?"), (Tokens{"¿", "qué", "tal", "?"}));
  EXPECT_EQ(tokenize("«Él» dijo…"), (Tokens{"«", "él", "»", "dijo", "…"}));
}

TEST(Align, WorkedExamples) {
  auto a = align_exact({"the", "cat", "sat"}, {"the", "cat", "sat"});
  EXPECT_EQ(a.matches, 3u);
  EXPECT_EQ(a.chunks, 1u);
  a = align_exact({"the", "cat"}, {"cat", "the"});
  EXPECT_EQ(a.matches, 2u);
  EXPECT_EQ(a.chunks, 2u);
  a = align_exact({"a", "b"}, {"c", "d"});
  EXPECT_EQ(a.matches, 0u);
  EXPECT_EQ(a.chunks, 0u);
  EXPECT_TRUE(a.optimal);
}

// Values from tests/oracles/derive_values.py.
TEST(Score, WorkedExamples) {
  EXPECT_NEAR(meteor_score("the cat sat", "the cat sat"), 0.9814814814814815, 1e-12);
  EXPECT_NEAR(meteor_score("the cat", "cat the"), 0.5, 1e-12);
  EXPECT_EQ(meteor_score("dog", "cat"), 0.0);
  EXPECT_NEAR(meteor_score("the cat sat on the mat", "on the mat the cat sat"), 0.9814814814814815,
              1e-12);
  EXPECT_NEAR(meteor_score("a b c d", "a x c d e"), 0.5215419501133786, 1e-12);
}

TEST(Score, Degenerate) {
  EXPECT_EQ(meteor_score("", ""), 1.0);
  EXPECT_EQ(meteor_score("a", ""), 0.0);
  EXPECT_EQ(meteor_score("", "a"), 0.0);
  EXPECT_EQ(meteor_score(" . ", "."), 1.0 - 0.5);
}

TEST(Score, ParamsValidated) {
  EXPECT_THROW(meteor_score("a", "a", {1.5, 3, 0.5}), tmr::ArgumentError);
  EXPECT_THROW(meteor_score("a", "a", {0.9, 0, 0.5}), tmr::ArgumentError);
  EXPECT_THROW(meteor_score("a", "a", {0.9, 3, -0.1}), tmr::ArgumentError);
}

TEST(Align, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(21);
  const Tokens vocab = {"a", "b", "c", "d"};
  for (int i = 0; i < 4000; ++i) {
    Tokens h(rng() % 7), r(rng() % 7);
    const std::size_t v = 1 + rng() % vocab.size();
    for (auto& t : h) t = vocab[rng() % v];
    for (auto& t : r) t = vocab[rng() % v];
    const auto a = align_exact(h, r);
    const auto [m, c] = oracle::exhaustive_alignment(h, r);
    ASSERT_EQ(a.matches, m);
    ASSERT_EQ(a.chunks, c);
    ASSERT_TRUE(a.optimal);
    ASSERT_LE(a.chunks, a.matches);
    ASSERT_LE(a.matches, std::min(h.size(), r.size()));
  }
}

TEST(Score, Properties) {
  std::mt19937_64 rng(22);
  const Tokens vocab = {"el", "la", "de", "que", "en", "un", "por", "con"};
  auto join = [](const Tokens& t) {
    std::string s;
    for (const auto& w : t) s += w + " ";
    return s;
  };
  for (int i = 0; i < 1500; ++i) {
    Tokens h(1 + rng() % 10), r(1 + rng() % 10);
    for (auto& t : h) t = vocab[rng() % vocab.size()];
    for (auto& t : r) t = vocab[rng() % vocab.size()];
    const double s = meteor_score(join(h), join(r));
    ASSERT_GE(s, 0.0);
    ASSERT_LE(s, 1.0);
    // Self score lower bound.
    const double self = meteor_score(join(h), join(h));
    ASSERT_GE(self + 1e-12, 1.0 - 0.5 * std::pow(1.0 / static_cast<double>(h.size()), 3.0));
    // Appending a token absent from the reference never helps.
    Tokens longer = h;
    longer.push_back("zzz");
    ASSERT_LE(meteor_score(join(longer), join(r)), s + 1e-12);
  }
}

TEST(Align, LongRepetitiveInputsStayBounded) {
  Tokens h, r;
  for (int i = 0; i < 80; ++i) {
    h.push_back(i % 3 == 0 ? "de" : (i % 3 == 1 ? "la" : "el"));
    r.push_back(i % 4 == 0 ? "la" : (i % 4 == 1 ? "de" : "el"));
  }
  const auto a = align_exact(h, r);
  EXPECT_LE(a.chunks, a.matches);
  EXPECT_GT(a.matches, 0u);
}
