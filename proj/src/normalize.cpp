#include "tmr/normalize.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "tmr/error.hpp"
#include "tmr/text.hpp"

namespace tmr {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool digit_at(std::string_view s, std::size_t i) { return i < s.size() && is_digit(s[i]); }

// Reads between `min` and `max` digits at `pos`; returns the count read (0 on
// failure) and the value.
std::size_t read_digits(std::string_view s, std::size_t pos, std::size_t min, std::size_t max,
                        int& value) {
  std::size_t n = 0;
  value = 0;
  while (n < max && digit_at(s, pos + n)) {
    value = value * 10 + (s[pos + n] - '0');
    ++n;
  }
  if (n < min || digit_at(s, pos + n)) return 0;
  return n;
}

std::size_t read_spaces(std::string_view s, std::size_t pos) {
  std::size_t n = 0;
  while (pos + n < s.size() && s[pos + n] == ' ') ++n;
  return n;
}

bool valid_day(int d) { return d >= 1 && d <= 31; }
bool valid_month(int m) { return m >= 1 && m <= 12; }

// "D de <mes> de YYYY"
std::size_t match_long_date(std::string_view s, std::size_t pos) {
  int day = 0;
  std::size_t p = pos;
  const std::size_t nd = read_digits(s, p, 1, 2, day);
  if (!nd || !valid_day(day)) return 0;
  p += nd;
  auto word = [&](std::string_view w) {
    const std::size_t sp = read_spaces(s, p);
    if (!sp || s.substr(p + sp, w.size()) != w) return false;
    p += sp + w.size();
    return true;
  };
  if (!word("de")) return 0;
  bool month = false;
  for (const auto& m : spanish_months()) {
    const std::size_t save = p;
    if (word(m) && !text::is_word_char(text::scalar_at(s, p))) {
      month = true;
      break;
    }
    p = save;
  }
  if (!month || !word("de")) return 0;
  const std::size_t sp = read_spaces(s, p);
  if (!sp) return 0;
  int year = 0;
  const std::size_t ny = read_digits(s, p + sp, 4, 4, year);
  if (!ny) return 0;
  return p + sp + ny - pos;
}

// D/M/YYYY or D-M-YYYY, same separator twice.
std::size_t match_numeric_date(std::string_view s, std::size_t pos) {
  int day = 0, month = 0, year = 0;
  std::size_t p = pos;
  const std::size_t nd = read_digits(s, p, 1, 2, day);
  if (!nd || !valid_day(day)) return 0;
  p += nd;
  if (p >= s.size() || (s[p] != '/' && s[p] != '-')) return 0;
  const char sep = s[p++];
  const std::size_t nm = read_digits(s, p, 1, 2, month);
  if (!nm || !valid_month(month)) return 0;
  p += nm;
  if (p >= s.size() || s[p] != sep) return 0;
  ++p;
  const std::size_t ny = read_digits(s, p, 4, 4, year);
  if (!ny) return 0;
  return p + ny - pos;
}

// YYYY-MM-DD
std::size_t match_iso_date(std::string_view s, std::size_t pos) {
  int year = 0, month = 0, day = 0;
  std::size_t p = pos;
  if (!read_digits(s, p, 4, 4, year)) return 0;
  p += 4;
  if (p >= s.size() || s[p] != '-') return 0;
  ++p;
  if (!read_digits(s, p, 2, 2, month) || !valid_month(month)) return 0;
  p += 2;
  if (p >= s.size() || s[p] != '-') return 0;
  ++p;
  if (!read_digits(s, p, 2, 2, day) || !valid_day(day)) return 0;
  return p + 2 - pos;
}

bool overlaps(const PlaceholderSpan& a, const PlaceholderSpan& b) {
  return a.start < b.end && b.start < a.end;
}

constexpr std::string_view kPlaceholderTokens[] = {"NUM", "DATE", "PER", "LOC", "ORG"};

}  // namespace

const char* to_string(PlaceholderKind kind) noexcept {
  switch (kind) {
    case PlaceholderKind::NUM: return "NUM";
    case PlaceholderKind::DATE: return "DATE";
    case PlaceholderKind::PER: return "PER";
    case PlaceholderKind::LOC: return "LOC";
    case PlaceholderKind::ORG: return "ORG";
  }
  return "?";
}

PlaceholderKind parse_placeholder_kind(std::string_view name) {
  if (name == "NUM") return PlaceholderKind::NUM;
  if (name == "DATE") return PlaceholderKind::DATE;
  if (name == "PER") return PlaceholderKind::PER;
  if (name == "LOC") return PlaceholderKind::LOC;
  if (name == "ORG") return PlaceholderKind::ORG;
  throw ArgumentError("unknown placeholder kind '" + std::string(name) + "'");
}

const std::vector<std::string>& spanish_months() {
  static const std::vector<std::string> months = {
      "enero", "febrero", "marzo",      "abril",   "mayo",      "junio",
      "julio", "agosto",  "septiembre", "octubre", "noviembre", "diciembre"};
  return months;
}

std::vector<PlaceholderSpan> detect_numbers(std::string_view text) {
  std::vector<PlaceholderSpan> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_digit(text[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (digit_at(text, i)) ++i;
    while (i + 1 < text.size() && (text[i] == '.' || text[i] == ',') && is_digit(text[i + 1])) {
      ++i;
      while (digit_at(text, i)) ++i;
    }
    spans.push_back({start, i, PlaceholderKind::NUM});
  }
  return spans;
}

std::vector<PlaceholderSpan> detect_dates(std::string_view text) {
  std::vector<PlaceholderSpan> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_digit(text[i]) || (i > 0 && is_digit(text[i - 1]))) {
      ++i;
      continue;
    }
    std::size_t len = match_iso_date(text, i);
    if (!len) len = match_numeric_date(text, i);
    if (!len) len = match_long_date(text, i);
    if (len) {
      spans.push_back({i, i + len, PlaceholderKind::DATE});
      i += len;
    } else {
      ++i;
    }
  }
  return spans;
}

struct GazetteerTagger::Trie {
  struct Node {
    std::map<unsigned char, std::size_t> next;
    int kind = -1;
  };
  std::vector<Node> nodes{Node{}};

  void insert(std::string_view key, PlaceholderKind kind) {
    std::size_t at = 0;
    for (char ch : key) {
      const auto c = static_cast<unsigned char>(ch);
      auto it = nodes[at].next.find(c);
      if (it == nodes[at].next.end()) {
        nodes.push_back(Node{});
        it = nodes[at].next.emplace(c, nodes.size() - 1).first;
      }
      at = it->second;
    }
    nodes[at].kind = static_cast<int>(kind);
  }
};

GazetteerTagger::GazetteerTagger(std::vector<Entry> entries) : trie_(std::make_unique<Trie>()) {
  for (const auto& e : entries) {
    if (e.kind != PlaceholderKind::PER && e.kind != PlaceholderKind::LOC &&
        e.kind != PlaceholderKind::ORG) {
      throw ArgumentError("gazetteer kinds are PER, LOC or ORG; got " +
                          std::string(to_string(e.kind)));
    }
    if (text::trim(e.surface).empty()) throw ArgumentError("gazetteer surface is empty");
    // A surface containing a placeholder name could first match after a
    // replacement ("X1" -> "XNUM"), so normalizing twice would differ.
    for (auto token : kPlaceholderTokens) {
      if (e.surface.find(token) != std::string::npos) {
        throw ArgumentError("gazetteer surface '" + e.surface + "' contains the placeholder name " +
                            std::string(token));
      }
    }
    trie_->insert(e.surface, e.kind);
    ++size_;
  }
}

GazetteerTagger::~GazetteerTagger() = default;
GazetteerTagger::GazetteerTagger(GazetteerTagger&&) noexcept = default;
GazetteerTagger& GazetteerTagger::operator=(GazetteerTagger&&) noexcept = default;

GazetteerTagger GazetteerTagger::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (!text::is_valid_utf8(line)) throw ParseError(line_no, "invalid UTF-8");
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(line_no, "expected surface<TAB>kind");
    }
    const auto surface = text::trim(std::string_view(line).substr(0, tab));
    const auto kind_name = text::trim(std::string_view(line).substr(tab + 1));
    try {
      entries.push_back({std::string(surface), parse_placeholder_kind(kind_name)});
    } catch (const ArgumentError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (in.bad()) throw IoError("read failed: " + path.string());
  try {
    return GazetteerTagger(std::move(entries));
  } catch (const ArgumentError& e) {
    throw ParseError(0, e.what());
  }
}

std::vector<PlaceholderSpan> GazetteerTagger::detect(std::string_view text) const {
  std::vector<PlaceholderSpan> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    const bool at_scalar_start = (static_cast<unsigned char>(text[i]) & 0xC0) != 0x80;
    if (!at_scalar_start || text::is_word_char(text::scalar_before(text, i))) {
      ++i;
      continue;
    }
    std::size_t at = 0;
    std::size_t best_end = 0;
    int best_kind = -1;
    for (std::size_t j = i; j < text.size(); ++j) {
      const auto it = trie_->nodes[at].next.find(static_cast<unsigned char>(text[j]));
      if (it == trie_->nodes[at].next.end()) break;
      at = it->second;
      if (trie_->nodes[at].kind >= 0 && !text::is_word_char(text::scalar_at(text, j + 1))) {
        // Only accept ends on a scalar boundary.
        if (j + 1 == text.size() || (static_cast<unsigned char>(text[j + 1]) & 0xC0) != 0x80) {
          best_end = j + 1;
          best_kind = trie_->nodes[at].kind;
        }
      }
    }
    if (best_kind >= 0) {
      spans.push_back({i, best_end, static_cast<PlaceholderKind>(best_kind)});
      i = best_end;
    } else {
      ++i;
    }
  }
  return spans;
}

std::vector<PlaceholderSpan> resolve_spans(std::string_view text,
                                           const std::vector<const SpanProducer*>& producers) {
  std::vector<PlaceholderSpan> accepted;
  for (const auto* producer : producers) {
    if (!producer) continue;
    auto spans = producer->detect(text);
    std::sort(spans.begin(), spans.end(), [](const auto& a, const auto& b) {
      return a.start != b.start ? a.start < b.start : a.end < b.end;
    });
    for (std::size_t k = 0; k < spans.size(); ++k) {
      const auto& s = spans[k];
      if (s.start >= s.end || s.end > text.size()) {
        throw ProducerContractError(producer->name() + " returned an invalid span [" +
                                    std::to_string(s.start) + ", " + std::to_string(s.end) + ")");
      }
      if (k > 0 && overlaps(spans[k - 1], s)) {
        throw ProducerContractError(producer->name() + " returned overlapping spans");
      }
    }
    std::vector<PlaceholderSpan> fresh;
    for (const auto& s : spans) {
      const bool clash = std::any_of(accepted.begin(), accepted.end(),
                                     [&](const auto& a) { return overlaps(a, s); });
      if (!clash) fresh.push_back(s);
    }
    accepted.insert(accepted.end(), fresh.begin(), fresh.end());
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const auto& a, const auto& b) { return a.start < b.start; });
  return accepted;
}

std::string apply_placeholders(std::string_view text,
                               const std::vector<const SpanProducer*>& producers) {
  const auto spans = resolve_spans(text, producers);
  std::string out;
  out.reserve(text.size());
  std::size_t at = 0;
  for (const auto& s : spans) {
    out.append(text.substr(at, s.start - at));
    out.append(to_string(s.kind));
    at = s.end;
  }
  out.append(text.substr(at));
  return out;
}

std::vector<const SpanProducer*> PlaceholderPipeline::producers() const {
  std::vector<const SpanProducer*> out{&dates_};
  if (tagger_) out.push_back(tagger_);
  out.push_back(&numbers_);
  return out;
}

std::string PlaceholderPipeline::operator()(std::string_view text) const {
  return apply_placeholders(text, producers());
}

}  // namespace tmr
