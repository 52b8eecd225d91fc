#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tmr/vector.hpp"

namespace tmr {

using UnitId = std::uint64_t;

/// One source/target segment pair.
struct TranslationUnit {
  UnitId id = 0;
  std::string source_text;
  std::string target_text;
  std::string source_lang = "en";
  std::string target_lang = "es";

  bool operator==(const TranslationUnit&) const = default;
};

/// A unit plus the embedding of its source segment, when computed.
struct MemoryRecord {
  TranslationUnit unit;
  std::optional<EmbeddingVector> vector;

  bool operator==(const MemoryRecord&) const = default;
};

enum class UnitFormat { tsv, jsonl };

UnitFormat parse_unit_format(std::string_view name);
/// Picks jsonl for `.jsonl`/`.json` extensions, tsv otherwise.
UnitFormat unit_format_for_path(const std::filesystem::path& path);

struct LanguagePair {
  std::string source = "en";
  std::string target = "es";
};

/// Reads one unit per non-empty line. TSV lines are `source<TAB>target` with
/// `\t`, `\n`, `\r` and `\\` escapes; ids are assigned 0..n-1 in file order.
/// JSONL objects carry `id`, `source`, `target`, `source_lang`,
/// `target_lang`; a missing `id` takes the line's ordinal and missing
/// languages take `langs`. Fields are trimmed of surrounding spaces (not
/// tabs or newlines, which survive a write/load round trip).
///
/// Throws ParseError (with the 1-based line number) on malformed lines or an
/// empty source, IoError when the file cannot be read.
std::vector<TranslationUnit> load_units(const std::filesystem::path& path,
                                        UnitFormat format,
                                        const LanguagePair& langs = {});

std::vector<TranslationUnit> parse_units(std::string_view content,
                                         UnitFormat format,
                                         const LanguagePair& langs = {});

/// Writes `units` so that load_units reads them back unchanged. Returns the
/// number of units written.
std::size_t write_units(const std::vector<TranslationUnit>& units,
                        const std::filesystem::path& path, UnitFormat format);

std::string format_units(const std::vector<TranslationUnit>& units,
                         UnitFormat format);

std::string escape_tsv_field(std::string_view field);
std::string unescape_tsv_field(std::string_view field);

/// Throws ArgumentError unless the source has visible content.
void validate_unit(const TranslationUnit& unit);

}  // namespace tmr
