#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "tmr/error.hpp"
#include "tmr/tm_eval.hpp"

using namespace tmr;

namespace {

const std::vector<TranslationUnit> kToy5 = {
    {0, "the cat sat on the mat", "el gato se sentó en la alfombra"},
    {1, "the dog sat on the mat", "el perro se sentó en la alfombra"},
    {2, "hello world", "hola mundo"},
    {3, "a cat was on a mat", "un gato estaba en una alfombra"},
    {4, "good morning", "buenos días"},
};

struct Toy {
  TranslationMemoryStore store;
  VectorIndex index;
};

Toy build(const std::vector<TranslationUnit>& units, EmbeddingProvider& provider) {
  auto store = make_store(units, provider.spec().dim);
  for (const auto& u : units) store.set_vector(u.id, embed_one(provider, u.source_text));
  auto index = VectorIndex::from_store(store);
  return {std::move(store), std::move(index)};
}

EvalRow row(UnitId lex_id, UnitId emb_id, double fuzzy, double m_lex, double m_emb,
            std::string lex_target = "a", std::string emb_target = "b") {
  EvalRow r;
  r.lex_match.unit = {lex_id, "s", std::move(lex_target)};
  r.emb_match.unit = {emb_id, "s", std::move(emb_target)};
  r.lex_fuzzy = fuzzy;
  r.meteor_lex = m_lex;
  r.meteor_emb = m_emb;
  return r;
}

}  // namespace

// Expected numbers come from tests/oracles/derive_values.py.
TEST(BuildRows, HandComputedToyMemory) {
  DeterministicProvider provider;
  const auto toy = build(kToy5, provider);
  const std::vector<EvalInput> inputs = {
      {"the cat sat on a mat", "el gato se sentó en una alfombra"},
      {"mat the on sat cat the", "el gato se sentó en la alfombra"},
      {"good world", "el gato se sentó en la alfombra"},
  };
  const auto rows = build_eval_rows(inputs, toy.store, toy.index, provider);
  ASSERT_EQ(rows.size(), 3u);

  EXPECT_EQ(rows[0].lex_match.unit.id, 0u);
  EXPECT_EQ(rows[0].emb_match.unit.id, 0u);
  EXPECT_NEAR(rows[0].lex_fuzzy, 0.8636363636363636, 1e-12);
  EXPECT_NEAR(rows[0].emb_match.score, 0.8816129305559954, 1e-6);
  EXPECT_NEAR(rows[0].meteor_lex, 0.8412698412698414, 1e-12);
  EXPECT_EQ(rows[0].meteor_lex, rows[0].meteor_emb);

  EXPECT_EQ(rows[1].lex_match.unit.id, 1u);
  EXPECT_EQ(rows[1].emb_match.unit.id, 0u);
  EXPECT_NEAR(rows[1].lex_fuzzy, 0.40909090909090906, 1e-12);
  EXPECT_NEAR(rows[1].meteor_lex, 0.8412698412698414, 1e-12);
  EXPECT_NEAR(rows[1].meteor_emb, 0.9985422740524781, 1e-12);

  EXPECT_EQ(rows[2].lex_match.unit.id, 4u);
  EXPECT_EQ(rows[2].emb_match.unit.id, 2u);
  EXPECT_NEAR(rows[2].lex_fuzzy, 0.5833333333333333, 1e-12);
  EXPECT_EQ(rows[2].meteor_lex, 0.0);
  EXPECT_EQ(rows[2].meteor_emb, 0.0);

  EXPECT_EQ(build_eval_rows(inputs, toy.store, toy.index, provider, 3)[1].emb_match.unit.id, 0u);
  EXPECT_TRUE(build_eval_rows({}, toy.store, toy.index, provider).empty());
}

TEST(BuildRows, VerbatimQueriesScoreOneAndTie) {
  DeterministicProvider provider;
  const auto toy = build(kToy5, provider);
  std::vector<EvalInput> inputs;
  for (const auto& u : kToy5) inputs.push_back({u.source_text, u.target_text});
  const auto rows = build_eval_rows(inputs, toy.store, toy.index, provider);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].lex_match.unit.id, i);
    EXPECT_EQ(rows[i].emb_match.unit.id, i);
    EXPECT_EQ(rows[i].lex_fuzzy, 1.0);
    EXPECT_EQ(rows[i].emb_match.score, 1.0);
    EXPECT_EQ(rows[i].meteor_lex, rows[i].meteor_emb);
    EXPECT_TRUE(is_tie(rows[i]));
  }
  EXPECT_TRUE(drop_ties(rows).empty());
}

TEST(BuildRows, EmptyMemory) {
  DeterministicProvider provider;
  TranslationMemoryStore store(512);
  VectorIndex index(512);
  const std::vector<EvalInput> inputs = {{"q", "r"}};
  EXPECT_THROW(build_eval_rows(inputs, store, index, provider), EmptyMemoryError);
}

TEST(DropTies, Rules) {
  const std::vector<EvalRow> rows = {
      row(1, 1, 0.5, 0.1, 0.1, "x", "x"),
      row(1, 2, 0.5, 0.1, 0.2, "same", "same"),
      row(1, 2, 0.5, 0.1, 0.2, "a", "b"),
      row(3, 4, 0.5, 0.1, 0.2, "c", "d"),
  };
  const auto kept = drop_ties(rows);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].lex_match.unit.target_text, "a");
  EXPECT_EQ(drop_ties({rows[2], rows[3]}).size(), 2u);
}

TEST(PartitionSpecTest, BucketsAndEdges) {
  PartitionSpec spec;
  EXPECT_NO_THROW(spec.validate());
  EXPECT_EQ(spec.buckets(), 5u);
  EXPECT_EQ(spec.bucket_of(0.0), 0u);
  EXPECT_EQ(spec.bucket_of(0.1999), 0u);
  EXPECT_EQ(spec.bucket_of(0.2), 1u);
  EXPECT_EQ(spec.bucket_of(0.8), 4u);
  EXPECT_EQ(spec.bucket_of(1.0), 4u);
  EXPECT_THROW(spec.bucket_of(1.01), ArgumentError);
  EXPECT_EQ(spec.label(0), "[0.00, 0.20)");
  EXPECT_EQ(spec.label(4), "[0.80, 1.00]");
  EXPECT_THROW((PartitionSpec{{0.0, 0.5, 0.5, 1.0}}.validate()), ArgumentError);
  EXPECT_THROW((PartitionSpec{{0.1, 1.0}}.validate()), ArgumentError);
  EXPECT_THROW((PartitionSpec{{0.0}}.validate()), ArgumentError);
}

TEST(Partition, CountsAndAverages) {
  const std::vector<EvalRow> rows = {
      row(1, 2, 0.1, 0.2, 0.4),
      row(3, 4, 0.5, 0.3, 0.1),
      row(5, 6, 0.9, 0.6, 0.5),
      row(7, 8, 0.8, 0.8, 0.7),
      row(9, 10, 0.15, 0.4, 0.6),
      row(11, 11, 0.3, 1.0, 1.0),  // tie
  };
  const auto report = partition_and_average(rows);
  ASSERT_EQ(report.buckets.size(), 5u);
  EXPECT_EQ(report.rows_in, 6u);
  EXPECT_EQ(report.ties_dropped, 1u);
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  for (const auto& b : report.buckets) {
    counts.push_back(b.count);
    total += b.count;
  }
  EXPECT_EQ(counts, (std::vector<std::size_t>{2, 0, 1, 0, 2}));
  EXPECT_EQ(total, report.retained());
  EXPECT_DOUBLE_EQ(*report.buckets[0].avg_meteor_lex, 0.3);
  EXPECT_DOUBLE_EQ(*report.buckets[0].avg_meteor_emb, 0.5);
  EXPECT_FALSE(report.buckets[1].avg_meteor_lex);
  EXPECT_DOUBLE_EQ(*report.buckets[4].avg_meteor_lex, 0.7);
  EXPECT_DOUBLE_EQ(*report.buckets[4].avg_meteor_emb, 0.6);
  EXPECT_FALSE(report.normalized);
}

TEST(Partition, NormalizationRedropsTiesAndRescores) {
  const PlaceholderPipeline pipeline;
  std::vector<EvalRow> rows = {
      row(1, 2, 0.5, 0.0, 0.0, "pagó 30 euros", "pagó 45 euros"),
      row(3, 4, 0.5, 0.0, 0.0, "el 1/2/2020 llegó", "el 3/4/2021 salió"),
      row(5, 6, 0.5, 0.0, 0.0, "igual", "igual"),
  };
  rows[0].reference = "pagó 12 euros";
  rows[1].reference = "el 9/9/2019 llegó";
  const auto plain = partition_and_average(rows);
  EXPECT_EQ(plain.ties_dropped, 1u);
  const auto norm = partition_and_average(rows, {}, &pipeline);
  EXPECT_TRUE(norm.normalized);
  EXPECT_EQ(norm.ties_dropped, 2u);
  ASSERT_EQ(norm.buckets[2].count, 1u);
  EXPECT_NEAR(*norm.buckets[2].avg_meteor_lex,
              meteor::meteor_score("el DATE llegó", "el DATE llegó"), 1e-12);
  EXPECT_NEAR(*norm.buckets[2].avg_meteor_emb,
              meteor::meteor_score("el DATE salió", "el DATE llegó"), 1e-12);
}

TEST(MeanSts, PerBucket) {
  DeterministicProvider provider(64);
  std::vector<EvalRow> rows = {row(1, 2, 0.9, 0, 0), row(3, 4, 0.85, 0, 0), row(5, 6, 0.1, 0, 0)};
  for (auto& r : rows) r.reference = r.emb_match.unit.target_text;
  rows[0].query = "alpha beta";
  rows[0].emb_match.unit.source_text = "alpha beta";
  rows[1].query = "gamma";
  rows[1].emb_match.unit.source_text = "gamma";
  rows[2].query = "uno dos";
  rows[2].emb_match.unit.source_text = "dos tres";
  rows[2].reference = "x y";
  rows[2].emb_match.unit.target_text = "x z";
  const auto means = mean_sts_per_bucket(rows, provider);
  ASSERT_EQ(means.size(), 5u);
  EXPECT_NEAR(*means[4], 1.0, 1e-12);
  EXPECT_FALSE(means[1]);
  EXPECT_DOUBLE_EQ(*means[0], cosine(deterministic_embed("uno dos", 64), deterministic_embed("dos tres", 64)));
  const auto by_target = mean_sts_per_bucket(rows, provider, {}, StsMode::reference_target);
  EXPECT_DOUBLE_EQ(*by_target[0], cosine(deterministic_embed("x y", 64), deterministic_embed("x z", 64)));
  EXPECT_EQ(parse_sts_mode("reference-target"), StsMode::reference_target);
  EXPECT_THROW(parse_sts_mode("other"), ArgumentError);
}

TEST(MeanSts, TwoRowsAverage) {
  DeterministicProvider provider(64);
  std::vector<EvalRow> rows = {row(1, 2, 0.3, 0, 0), row(3, 4, 0.35, 0, 0)};
  rows[0].query = "a b";
  rows[0].emb_match.unit.source_text = "b c";
  rows[1].query = "d e f";
  rows[1].emb_match.unit.source_text = "f";
  const double c1 = cosine(deterministic_embed("a b", 64), deterministic_embed("b c", 64));
  const double c2 = cosine(deterministic_embed("d e f", 64), deterministic_embed("f", 64));
  EXPECT_DOUBLE_EQ(*mean_sts_per_bucket(rows, provider)[1], (c1 + c2) / 2);
}

TEST(Report, JsonAndTable) {
  const std::vector<EvalRow> rows = {row(1, 2, 0.8, 0.5, 0.25), row(3, 4, 0.1, 0.2, 0.3)};
  TmEvalReport report;
  report.partition = partition_and_average(rows);
  report.mean_sts = {0.5, std::nullopt, std::nullopt, std::nullopt, 0.75};
  report.provider = "p";
  const auto j = nlohmann::json::parse(to_json(report));
  EXPECT_EQ(j["retained"], 2);
  EXPECT_EQ(j["buckets"].size(), 5u);
  EXPECT_EQ(j["buckets"][4]["count"], 1);
  EXPECT_EQ(j["buckets"][4]["avg_meteor_emb"], 0.25);
  EXPECT_TRUE(j["buckets"][1]["avg_meteor_lex"].is_null());
  const auto table = to_table(report);
  EXPECT_NE(table.find("[0.80, 1.00]"), std::string::npos);
  EXPECT_NE(table.find("0.7500"), std::string::npos);
}

TEST(LoadInputs, LineAligned) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto in = dir / "tmr_inputs.txt";
  const auto refs = dir / "tmr_refs.txt";
  std::ofstream(in) << "uno\ndos\n";
  std::ofstream(refs) << "one\ntwo\n";
  const auto inputs = load_eval_inputs(in, refs);
  ASSERT_EQ(inputs.size(), 2u);
  EXPECT_EQ(inputs[1].query, "dos");
  EXPECT_EQ(inputs[1].reference, "two");
  std::ofstream(refs) << "one\n";
  EXPECT_THROW(load_eval_inputs(in, refs), ParseError);
  std::filesystem::remove(in);
  std::filesystem::remove(refs);
}
