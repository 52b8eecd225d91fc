#include "tmr/tm_core.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "tmr/error.hpp"
#include "tmr/text.hpp"

namespace tmr {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string json_string(const json& obj, const char* key, std::size_t line,
                        const std::string& fallback, bool required) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) throw ParseError(line, std::string("missing key '") + key + "'");
    return fallback;
  }
  if (!it->is_string()) {
    throw ParseError(line, std::string("key '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

// Segment trimming removes spaces only; tabs and line breaks are content
// (they travel escaped in TSV) and survive a write/load cycle.
std::string_view trim_segment(std::string_view s) {
  auto leading = [](std::string_view v) -> std::size_t {
    if (v.empty()) return 0;
    if (v[0] == ' ' || v[0] == '\v' || v[0] == '\f') return 1;
    if (v.size() >= 2 && static_cast<unsigned char>(v[0]) == 0xC2 &&
        static_cast<unsigned char>(v[1]) == 0xA0) {
      return 2;
    }
    return 0;
  };
  auto trailing = [](std::string_view v) -> std::size_t {
    if (v.empty()) return 0;
    const char c = v.back();
    if (c == ' ' || c == '\v' || c == '\f') return 1;
    if (v.size() >= 2 && static_cast<unsigned char>(v[v.size() - 2]) == 0xC2 &&
        static_cast<unsigned char>(c) == 0xA0) {
      return 2;
    }
    return 0;
  };
  while (std::size_t n = leading(s)) s.remove_prefix(n);
  while (std::size_t n = trailing(s)) s.remove_suffix(n);
  return s;
}

}  // namespace

UnitFormat parse_unit_format(std::string_view name) {
  if (name == "tsv") return UnitFormat::tsv;
  if (name == "jsonl") return UnitFormat::jsonl;
  throw ArgumentError("unknown unit format '" + std::string(name) + "'");
}

UnitFormat unit_format_for_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".json") ? UnitFormat::jsonl : UnitFormat::tsv;
}

std::string escape_tsv_field(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (char c : field) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_tsv_field(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const char c = field[i];
    if (c != '\\' || i + 1 == field.size()) {
      out.push_back(c);
      continue;
    }
    const char n = field[++i];
    switch (n) {
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case '\\': out.push_back('\\'); break;
      // Unknown escapes are kept verbatim.
      default:
        out.push_back('\\');
        out.push_back(n);
    }
  }
  return out;
}

void validate_unit(const TranslationUnit& unit) {
  if (text::trim(unit.source_text).empty()) {
    throw ArgumentError("unit " + std::to_string(unit.id) + ": empty source text");
  }
}

std::vector<TranslationUnit> parse_units(std::string_view content,
                                         UnitFormat format,
                                         const LanguagePair& langs) {
  std::vector<TranslationUnit> units;
  std::unordered_set<UnitId> seen_ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty()) continue;
    if (!text::is_valid_utf8(line)) throw ParseError(line_no, "invalid UTF-8");

    TranslationUnit unit;
    unit.source_lang = langs.source;
    unit.target_lang = langs.target;
    if (format == UnitFormat::tsv) {
      const auto fields = split_tabs(line);
      if (fields.size() != 2) {
        throw ParseError(line_no, "expected 2 fields, got " +
                                      std::to_string(fields.size()));
      }
      unit.id = units.size();
      unit.source_text = unescape_tsv_field(trim_segment(fields[0]));
      unit.target_text = unescape_tsv_field(trim_segment(fields[1]));
    } else {
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::parse_error& e) {
        throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
      }
      if (!obj.is_object()) throw ParseError(line_no, "expected a JSON object");
      if (const auto it = obj.find("id"); it != obj.end() && !it->is_null()) {
        if (!it->is_number_unsigned()) {
          throw ParseError(line_no, "key 'id' must be a non-negative integer");
        }
        unit.id = it->get<UnitId>();
      } else {
        unit.id = units.size();
      }
      unit.source_text = std::string(trim_segment(json_string(obj, "source", line_no, {}, true)));
      unit.target_text = std::string(trim_segment(json_string(obj, "target", line_no, {}, true)));
      unit.source_lang = json_string(obj, "source_lang", line_no, langs.source, false);
      unit.target_lang = json_string(obj, "target_lang", line_no, langs.target, false);
    }
    if (text::trim(unit.source_text).empty()) {
      throw ParseError(line_no, "empty source text");
    }
    if (!seen_ids.insert(unit.id).second) {
      throw ParseError(line_no, "duplicate id " + std::to_string(unit.id));
    }
    units.push_back(std::move(unit));
  }
  return units;
}

std::vector<TranslationUnit> load_units(const std::filesystem::path& path,
                                        UnitFormat format,
                                        const LanguagePair& langs) {
  return parse_units(read_file(path), format, langs);
}

std::string format_units(const std::vector<TranslationUnit>& units,
                         UnitFormat format) {
  std::string out;
  for (const auto& unit : units) {
    validate_unit(unit);
    if (format == UnitFormat::tsv) {
      out += escape_tsv_field(unit.source_text);
      out.push_back('\t');
      out += escape_tsv_field(unit.target_text);
    } else {
      json obj = {{"id", unit.id},
                  {"source", unit.source_text},
                  {"target", unit.target_text},
                  {"source_lang", unit.source_lang},
                  {"target_lang", unit.target_lang}};
      out += obj.dump();
    }
    out.push_back('\n');
  }
  return out;
}

std::size_t write_units(const std::vector<TranslationUnit>& units,
                        const std::filesystem::path& path, UnitFormat format) {
  write_file(path, format_units(units, format));
  return units.size();
}

}  // namespace tmr
