#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace tmr {

enum class PlaceholderKind { NUM, DATE, PER, LOC, ORG };

const char* to_string(PlaceholderKind kind) noexcept;
PlaceholderKind parse_placeholder_kind(std::string_view name);

/// Byte range [start, end) of the original text.
struct PlaceholderSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  PlaceholderKind kind = PlaceholderKind::NUM;

  bool operator==(const PlaceholderSpan&) const = default;
};

/// Lowercase Spanish month names recognised inside "D de <mes> de YYYY".
const std::vector<std::string>& spanish_months();

/// Maximal digit runs, with '.' or ',' allowed between digits as group or
/// decimal separators: "1.234,56" is one span, "2018." stops before the dot.
std::vector<PlaceholderSpan> detect_numbers(std::string_view text);

/// Dates in four shapes: "D de <mes> de YYYY", D/M/YYYY, D-M-YYYY and
/// YYYY-MM-DD. Day and month take one or two digits; a match may not be
/// glued to a neighbouring digit.
std::vector<PlaceholderSpan> detect_dates(std::string_view text);

/// Anything that proposes spans for one pass of apply_placeholders.
class SpanProducer {
 public:
  virtual ~SpanProducer() = default;
  virtual std::string name() const = 0;
  virtual std::vector<PlaceholderSpan> detect(std::string_view text) const = 0;
};

/// Entity tagging contract: spans lie inside the input and carry PER, LOC or
/// ORG.
class EntityTagger : public SpanProducer {
 public:
  virtual std::vector<PlaceholderKind> supported_kinds() const {
    return {PlaceholderKind::PER, PlaceholderKind::LOC, PlaceholderKind::ORG};
  }
};

class DateProducer final : public SpanProducer {
 public:
  std::string name() const override { return "dates"; }
  std::vector<PlaceholderSpan> detect(std::string_view text) const override {
    return detect_dates(text);
  }
};

class NumberProducer final : public SpanProducer {
 public:
  std::string name() const override { return "numbers"; }
  std::vector<PlaceholderSpan> detect(std::string_view text) const override {
    return detect_numbers(text);
  }
};

/// Surface-form dictionary tagger. Matching is case-sensitive, prefers the
/// longest entry at each position and only accepts matches that are not
/// glued to a letter or digit on either side.
class GazetteerTagger final : public EntityTagger {
 public:
  struct Entry {
    std::string surface;
    PlaceholderKind kind;
  };

  /// Throws ArgumentError for a non-entity kind, an empty surface, or a
  /// surface containing a placeholder name (NUM, DATE, PER, LOC, ORG) as a
  /// substring.
  explicit GazetteerTagger(std::vector<Entry> entries);
  ~GazetteerTagger() override;
  GazetteerTagger(GazetteerTagger&&) noexcept;
  GazetteerTagger& operator=(GazetteerTagger&&) noexcept;

  /// Reads `surface<TAB>kind` lines (UTF-8); blank lines and lines starting
  /// with '#' are ignored. Throws ParseError / IoError.
  static GazetteerTagger load(const std::filesystem::path& path);

  std::string name() const override { return "gazetteer"; }
  std::vector<PlaceholderSpan> detect(std::string_view text) const override;
  std::size_t size() const noexcept { return size_; }

 private:
  struct Trie;
  std::unique_ptr<Trie> trie_;
  std::size_t size_ = 0;
};

/// Runs `producers` in the given priority order. Spans that overlap a span
/// accepted from an earlier producer are dropped; each accepted span is
/// replaced by its kind name ("DATE", "LOC", ...). A producer that returns
/// overlapping or out-of-range spans raises ProducerContractError.
std::string apply_placeholders(std::string_view text,
                               const std::vector<const SpanProducer*>& producers);

/// Spans accepted by the same procedure, sorted by start offset.
std::vector<PlaceholderSpan> resolve_spans(std::string_view text,
                                           const std::vector<const SpanProducer*>& producers);

/// DATE > ENTITY > NUM pipeline around an optional entity tagger.
class PlaceholderPipeline {
 public:
  explicit PlaceholderPipeline(const EntityTagger* tagger = nullptr) : tagger_(tagger) {}

  std::string operator()(std::string_view text) const;
  std::vector<const SpanProducer*> producers() const;

 private:
  DateProducer dates_;
  NumberProducer numbers_;
  const EntityTagger* tagger_;
};

}  // namespace tmr
