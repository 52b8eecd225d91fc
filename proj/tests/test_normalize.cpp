#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "tmr/error.hpp"
#include "tmr/normalize.hpp"

using namespace tmr;

#ifndef TMR_TEST_DATA
#error "TMR_TEST_DATA must point at tests/data"
#endif

namespace {

const std::filesystem::path kData = TMR_TEST_DATA;

std::vector<std::string> covered(std::string_view text, const std::vector<PlaceholderSpan>& spans) {
  std::vector<std::string> out;
  for (const auto& s : spans) out.emplace_back(text.substr(s.start, s.end - s.start));
  return out;
}

class FixedProducer : public SpanProducer {
 public:
  explicit FixedProducer(std::vector<PlaceholderSpan> spans) : spans_(std::move(spans)) {}
  std::string name() const override { return "fixed"; }
  std::vector<PlaceholderSpan> detect(std::string_view) const override { return spans_; }

 private:
  std::vector<PlaceholderSpan> spans_;
};

}  // namespace

TEST(Numbers, Patterns) {
  std::string t = "costó 1.234,56 euros";
  EXPECT_EQ(covered(t, detect_numbers(t)), (std::vector<std::string>{"1.234,56"}));
  EXPECT_TRUE(detect_numbers("sin cifras").empty());
  t = "A4";
  EXPECT_EQ(covered(t, detect_numbers(t)), (std::vector<std::string>{"4"}));
  t = "en 2018. Luego 3, 4 y 5,";
  EXPECT_EQ(covered(t, detect_numbers(t)), (std::vector<std::string>{"2018", "3", "4", "5"}));
}

TEST(Dates, Patterns) {
  std::string t = "el 5 de marzo de 2018";
  EXPECT_EQ(covered(t, detect_dates(t)), (std::vector<std::string>{"5 de marzo de 2018"}));
  t = "12/07/2019";
  EXPECT_EQ(covered(t, detect_dates(t)), (std::vector<std::string>{"12/07/2019"}));
  t = "del 1-1-2020 al 2021-11-30";
  EXPECT_EQ(covered(t, detect_dates(t)), (std::vector<std::string>{"1-1-2020", "2021-11-30"}));
  EXPECT_TRUE(detect_dates("marzo").empty());
  EXPECT_TRUE(detect_dates("5 de marzo").empty());
  EXPECT_TRUE(detect_dates("32/01/2020").empty());
  EXPECT_TRUE(detect_dates("10/13/2020").empty());
  EXPECT_TRUE(detect_dates("1/2-2020").empty());
  EXPECT_TRUE(detect_dates("112/07/2019").empty());
  EXPECT_TRUE(detect_dates("12/07/20190").empty());
  EXPECT_TRUE(detect_dates("5 de marzoo de 2018").empty());
  EXPECT_TRUE(detect_dates("5 de Marzo de 2018").empty());
  EXPECT_EQ(spanish_months().size(), 12u);
}

TEST(Apply, PriorityAndReplacement) {
  GazetteerTagger gaz({{"Madrid", PlaceholderKind::LOC}});
  PlaceholderPipeline pipeline(&gaz);
  EXPECT_EQ(pipeline("el 5 de marzo de 2018 en Madrid"), "el DATE en LOC");
  EXPECT_EQ(pipeline("nada que cambiar"), "nada que cambiar");
  EXPECT_EQ(PlaceholderPipeline()("el 12/07/2019 pagó 30"), "el DATE pagó NUM");
}

TEST(Apply, LaterProducersCannotOverlapEarlierSpans) {
  const std::string t = "abcdef";
  FixedProducer first({{1, 3, PlaceholderKind::PER}});
  FixedProducer second({{2, 4, PlaceholderKind::LOC}, {4, 6, PlaceholderKind::ORG}});
  EXPECT_EQ(apply_placeholders(t, {&first, &second}), "aPERdORG");
}

TEST(Apply, ProducerContract) {
  FixedProducer overlapping({{0, 3, PlaceholderKind::PER}, {2, 4, PlaceholderKind::LOC}});
  EXPECT_THROW(apply_placeholders("abcdef", {&overlapping}), ProducerContractError);
  FixedProducer out_of_range({{4, 9, PlaceholderKind::PER}});
  EXPECT_THROW(apply_placeholders("abcdef", {&out_of_range}), ProducerContractError);
  FixedProducer empty_span({{2, 2, PlaceholderKind::PER}});
  EXPECT_THROW(apply_placeholders("abcdef", {&empty_span}), ProducerContractError);
}

TEST(Gazetteer, LongestMatchAndBoundaries) {
  GazetteerTagger gaz({{"Banco", PlaceholderKind::ORG},
                       {"Banco Central Europeo", PlaceholderKind::ORG},
                       {"León", PlaceholderKind::LOC}});
  EXPECT_EQ(gaz.size(), 3u);
  std::string t = "el Banco Central Europeo y el Banco";
  EXPECT_EQ(covered(t, gaz.detect(t)), (std::vector<std::string>{"Banco Central Europeo", "Banco"}));
  EXPECT_TRUE(gaz.detect("Bancos y Leóna").empty());
  EXPECT_TRUE(gaz.detect("banco").empty());
  t = "(León)";
  EXPECT_EQ(covered(t, gaz.detect(t)), (std::vector<std::string>{"León"}));
}

TEST(Gazetteer, RejectsBadEntries) {
  EXPECT_THROW(GazetteerTagger({{"x", PlaceholderKind::NUM}}), ArgumentError);
  EXPECT_THROW(GazetteerTagger({{"  ", PlaceholderKind::LOC}}), ArgumentError);
  EXPECT_THROW(GazetteerTagger({{"Club DATE", PlaceholderKind::ORG}}), ArgumentError);
  EXPECT_THROW(GazetteerTagger({{"XNUM", PlaceholderKind::ORG}}), ArgumentError);
}

TEST(Gazetteer, LoadFile) {
  const auto gaz = GazetteerTagger::load(kData / "gazetteer.tsv");
  EXPECT_EQ(gaz.size(), 17u);
  const auto bad = std::filesystem::temp_directory_path() / "tmr_bad_gazetteer.tsv";
  {
    std::ofstream(bad) << "Madrid\tLOC\nParis\tCITY\n";
  }
  try {
    GazetteerTagger::load(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  {
    std::ofstream(bad) << "no tab\n";
  }
  EXPECT_THROW(GazetteerTagger::load(bad), ParseError);
  std::filesystem::remove(bad);
  EXPECT_THROW(GazetteerTagger::load("/nonexistent/gaz.tsv"), IoError);
}

TEST(Fixture, SpanishSentences) {
  const auto gaz = GazetteerTagger::load(kData / "gazetteer.tsv");
  const PlaceholderPipeline pipeline(&gaz);
  std::ifstream in(kData / "es_normalize.tsv");
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    ASSERT_NE(tab, std::string::npos);
    const std::string sentence = line.substr(0, tab);
    const std::string expected = line.substr(tab + 1);
    const std::string once = pipeline(sentence);
    EXPECT_EQ(once, expected) << sentence;
    EXPECT_EQ(pipeline(once), once) << "not idempotent: " << sentence;
    // DATE spans never also produce NUM spans.
    const auto spans = resolve_spans(sentence, pipeline.producers());
    for (const auto& d : detect_dates(sentence)) {
      for (const auto& s : spans) {
        if (s.start < d.end && d.start < s.end) EXPECT_EQ(s.kind, PlaceholderKind::DATE);
      }
    }
    ++n;
  }
  EXPECT_EQ(n, 50u);
}

// Text outside replaced spans is untouched, and normalizing twice changes
// nothing, on random mixes of digits, separators, words and entities.
TEST(Properties, ConfinedAndIdempotent) {
  GazetteerTagger gaz({{"Ana", PlaceholderKind::PER}, {"Río de la Plata", PlaceholderKind::LOC}});
  const PlaceholderPipeline pipeline(&gaz);
  const std::vector<std::string> pieces = {"1", "23", "/", "-", ".", ",", " ", "de", "marzo",
                                           "2019", "Ana", "Río de la Plata", "x", "ñ", "NUM"};
  std::mt19937_64 rng(31);
  for (int i = 0; i < 3000; ++i) {
    std::string t;
    const std::size_t len = rng() % 14;
    for (std::size_t k = 0; k < len; ++k) t += pieces[rng() % pieces.size()];
    const auto spans = resolve_spans(t, pipeline.producers());
    const std::string once = pipeline(t);
    ASSERT_EQ(pipeline(once), once) << t;
    std::string rebuilt;
    std::size_t at = 0;
    for (std::size_t k = 0; k < spans.size(); ++k) {
      ASSERT_LE(at, spans[k].start);
      rebuilt += t.substr(at, spans[k].start - at);
      rebuilt += to_string(spans[k].kind);
      at = spans[k].end;
    }
    rebuilt += t.substr(at);
    ASSERT_EQ(rebuilt, once);
  }
}
