#include "tmr/sts_eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "tmr/error.hpp"
#include "tmr/lexical.hpp"
#include "tmr/text.hpp"

namespace tmr {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

double parse_score(std::string_view field, std::size_t line_no) {
  const auto s = text::trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw ParseError(line_no, "score is not a number: '" + std::string(s) + "'");
  }
  return value;
}

void check_lengths(std::span<const double> x, std::span<const double> y, std::size_t min) {
  if (x.size() != y.size()) {
    throw ArgumentError("length mismatch: " + std::to_string(x.size()) + " vs " +
                        std::to_string(y.size()));
  }
  if (x.size() < min) throw ArgumentError("need at least " + std::to_string(min) + " values");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(x.begin(), x.end(), finite) || !std::all_of(y.begin(), y.end(), finite)) {
    throw ArgumentError("non-finite value");
  }
}

}  // namespace

StsFormat parse_sts_format(std::string_view name) {
  if (name == "sick") return StsFormat::sick;
  if (name == "tsv3") return StsFormat::tsv3;
  throw ArgumentError("unknown dataset format '" + std::string(name) + "'");
}

std::vector<StsPair> parse_sts(std::string_view content, StsFormat format, double lo, double hi) {
  if (!(lo < hi)) throw ArgumentError("gold scale needs lo < hi");
  std::vector<StsPair> pairs;
  std::size_t col_a = 0, col_b = 1, col_score = 2, min_fields = 3;
  bool header_pending = format == StsFormat::sick;
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
    const auto fields = split_tabs(line);
    if (header_pending) {
      header_pending = false;
      auto find = [&](std::string_view name) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
          if (text::trim(fields[i]) == name) return i;
        }
        throw ParseError(line_no, "header lacks column " + std::string(name));
      };
      col_a = find("sentence_A");
      col_b = find("sentence_B");
      col_score = find("relatedness_score");
      min_fields = std::max({col_a, col_b, col_score}) + 1;
      continue;
    }
    if (fields.size() < min_fields ||
        (format == StsFormat::tsv3 && fields.size() != 3)) {
      throw ParseError(line_no, "expected " + std::to_string(min_fields) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    StsPair p;
    p.s1 = std::string(text::trim(fields[col_a]));
    p.s2 = std::string(text::trim(fields[col_b]));
    p.gold = parse_score(fields[col_score], line_no);
    p.lo = lo;
    p.hi = hi;
    if (p.gold < lo || p.gold > hi) {
      std::ostringstream msg;
      msg << "score " << p.gold << " outside [" << lo << ", " << hi << "]";
      throw ParseError(line_no, msg.str());
    }
    pairs.push_back(std::move(p));
  }
  if (header_pending) throw ParseError(0, "missing header row");
  return pairs;
}

std::vector<StsPair> load_sts(const std::filesystem::path& path, StsFormat format, double lo,
                              double hi) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return parse_sts(buf.str(), format, lo, hi);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y, 2);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ArgumentError("zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y, 2);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double mse(std::span<const double> pred, std::span<const double> gold) {
  check_lengths(pred, gold, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - gold[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

std::vector<double> rescale_unit(std::span<const double> pred, double lo, double hi) {
  std::vector<double> out;
  out.reserve(pred.size());
  for (double p : pred) out.push_back(lo + p * (hi - lo));
  return out;
}

const char* to_string(StsMethod m) noexcept {
  return m == StsMethod::embed_cosine ? "embed_cosine" : "edit_minmax";
}

StsMethod parse_sts_method(std::string_view name) {
  if (name == "embed" || name == "embed_cosine") return StsMethod::embed_cosine;
  if (name == "edit" || name == "edit_minmax") return StsMethod::edit_minmax;
  throw ArgumentError("unknown method '" + std::string(name) + "'");
}

std::vector<double> predict_embed_cosine(std::span<const StsPair> pairs,
                                         EmbeddingProvider& provider) {
  std::vector<std::string> texts;
  texts.reserve(pairs.size() * 2);
  for (const auto& p : pairs) {
    texts.push_back(p.s1);
    texts.push_back(p.s2);
  }
  const auto vectors = embed_batch(provider, texts);
  std::vector<double> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out.push_back(cosine(vectors[2 * i], vectors[2 * i + 1]));
  }
  return out;
}

std::vector<double> predict_edit_minmax(std::span<const StsPair> pairs, unsigned threads) {
  std::vector<std::size_t> distances(pairs.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) distances[i] = levenshtein(pairs[i].s1, pairs[i].s2);
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(pairs.size())));
  if (threads <= 1) {
    work(0, pairs.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t step = (pairs.size() + threads - 1) / threads;
    for (std::size_t b = 0; b < pairs.size(); b += step) {
      pool.emplace_back(work, b, std::min(pairs.size(), b + step));
    }
    for (auto& t : pool) t.join();
  }
  return minmax_similarity(distances);
}

StsMetrics evaluate_sts(std::span<const StsPair> pairs, StsMethod method,
                        EmbeddingProvider* provider, unsigned threads) {
  if (pairs.empty()) throw ArgumentError("no pairs to evaluate");
  std::vector<double> pred;
  if (method == StsMethod::embed_cosine) {
    if (!provider) throw ArgumentError("embed_cosine needs an embedding provider");
    pred = predict_embed_cosine(pairs, *provider);
  } else {
    pred = predict_edit_minmax(pairs, threads);
  }
  std::vector<double> gold;
  gold.reserve(pairs.size());
  for (const auto& p : pairs) gold.push_back(p.gold);

  StsMetrics m;
  m.method = to_string(method);
  m.n = pairs.size();
  m.pearson = pearson(pred, gold);
  m.spearman = spearman(pred, gold);
  m.mse = mse(rescale_unit(pred, pairs.front().lo, pairs.front().hi), gold);
  return m;
}

std::string to_json(const StsMetrics& m) {
  nlohmann::ordered_json j;
  j["method"] = m.method;
  j["pearson"] = m.pearson;
  j["spearman"] = m.spearman;
  j["mse"] = m.mse;
  j["n"] = m.n;
  return j.dump();
}

}  // namespace tmr
