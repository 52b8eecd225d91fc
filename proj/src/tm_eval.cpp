#include "tmr/tm_eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "tmr/error.hpp"
#include "tmr/text.hpp"

namespace tmr {

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!text::is_valid_utf8(line)) {
      throw ParseError(lines.size() + 1, path.string() + ": invalid UTF-8");
    }
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw IoError("read failed: " + path.string());
  return lines;
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t step = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * step;
    const std::size_t end = std::min(n, begin + step);
    if (begin >= end) break;
    pool.emplace_back([&, t, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::optional<double> mean_or_null(double sum, std::size_t count) {
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

std::string fixed(std::optional<double> v, int width) {
  char buf[32];
  if (v) {
    std::snprintf(buf, sizeof buf, "%*.4f", width, *v);
  } else {
    std::snprintf(buf, sizeof buf, "%*s", width, "-");
  }
  return buf;
}

}  // namespace

std::vector<EvalInput> load_eval_inputs(const std::filesystem::path& inputs,
                                        const std::filesystem::path& refs) {
  auto queries = read_lines(inputs);
  auto references = read_lines(refs);
  if (queries.size() != references.size()) {
    throw ParseError(std::min(queries.size(), references.size()) + 1,
                     "inputs have " + std::to_string(queries.size()) + " lines but refs have " +
                         std::to_string(references.size()));
  }
  std::vector<EvalInput> out;
  out.reserve(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    out.push_back({std::move(queries[i]), std::move(references[i])});
  }
  return out;
}

std::vector<EvalRow> build_eval_rows(std::span<const EvalInput> inputs,
                                     const TranslationMemoryStore& store,
                                     const VectorIndex& index, EmbeddingProvider& provider,
                                     unsigned threads, const meteor::MeteorParams& params) {
  if (store.empty()) throw EmptyMemoryError("translation memory is empty");
  if (index.empty()) throw EmptyMemoryError("vector index is empty");
  params.validate();
  if (inputs.empty()) return {};

  std::vector<std::string> queries;
  queries.reserve(inputs.size());
  for (const auto& in : inputs) queries.push_back(in.query);
  const auto vectors = embed_batch(provider, queries);

  std::vector<EvalRow> rows(inputs.size());
  parallel_for(inputs.size(), threads, [&](std::size_t i) {
    EvalRow& row = rows[i];
    row.query = inputs[i].query;
    row.reference = inputs[i].reference;
    row.lex_match = best_lexical_match(row.query, store);
    row.lex_fuzzy = row.lex_match.score;

    const auto top = index.nearest(vectors[i], 1);
    auto record = store.get(top.front().id);
    if (!record) throw ConflictError("index id " + std::to_string(top.front().id) + " not in store");
    row.emb_match.unit = std::move(record->unit);
    row.emb_match.score = top.front().similarity;
    row.emb_match.method = MatchMethod::embedding;

    row.meteor_lex = meteor::meteor_score(row.lex_match.unit.target_text, row.reference, params);
    row.meteor_emb = meteor::meteor_score(row.emb_match.unit.target_text, row.reference, params);
  });
  return rows;
}

bool is_tie(const EvalRow& row) {
  return row.lex_match.unit.id == row.emb_match.unit.id ||
         row.lex_match.unit.target_text == row.emb_match.unit.target_text;
}

std::vector<EvalRow> drop_ties(std::vector<EvalRow> rows) {
  rows.erase(std::remove_if(rows.begin(), rows.end(), is_tie), rows.end());
  return rows;
}

void PartitionSpec::validate() const {
  if (edges.size() < 2) throw ArgumentError("partition needs at least two edges");
  if (edges.front() != 0.0 || edges.back() != 1.0) {
    throw ArgumentError("partition edges must span [0, 1]");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw ArgumentError("partition edges must strictly increase");
  }
}

std::size_t PartitionSpec::bucket_of(double score) const {
  if (!(score >= 0.0 && score <= 1.0)) throw ArgumentError("score outside [0, 1]");
  const auto it = std::upper_bound(edges.begin(), edges.end(), score);
  const auto b = static_cast<std::size_t>(it - edges.begin());
  return std::min(b == 0 ? 0 : b - 1, buckets() - 1);
}

std::string PartitionSpec::label(std::size_t bucket) const {
  char buf[48];
  std::snprintf(buf, sizeof buf, bucket + 1 == buckets() ? "[%.2f, %.2f]" : "[%.2f, %.2f)",
                edges[bucket], edges[bucket + 1]);
  return buf;
}

PartitionReport partition_and_average(std::span<const EvalRow> rows, const PartitionSpec& spec,
                                      const PlaceholderPipeline* normalizer,
                                      const meteor::MeteorParams& params) {
  spec.validate();
  params.validate();
  PartitionReport report;
  report.normalized = normalizer != nullptr;
  report.rows_in = rows.size();
  report.buckets.resize(spec.buckets());
  for (std::size_t b = 0; b < spec.buckets(); ++b) {
    report.buckets[b].lo = spec.edges[b];
    report.buckets[b].hi = spec.edges[b + 1];
  }
  std::vector<double> sum_lex(spec.buckets(), 0.0), sum_emb(spec.buckets(), 0.0);

  for (const auto& row : rows) {
    double m_lex = row.meteor_lex;
    double m_emb = row.meteor_emb;
    bool tie = is_tie(row);
    if (normalizer && !tie) {
      const auto& norm = *normalizer;
      const std::string ref = norm(row.reference);
      const std::string lex = norm(row.lex_match.unit.target_text);
      const std::string emb = norm(row.emb_match.unit.target_text);
      tie = lex == emb;
      m_lex = meteor::meteor_score(lex, ref, params);
      m_emb = meteor::meteor_score(emb, ref, params);
    }
    if (tie) {
      ++report.ties_dropped;
      continue;
    }
    const std::size_t b = spec.bucket_of(row.lex_fuzzy);
    ++report.buckets[b].count;
    sum_lex[b] += m_lex;
    sum_emb[b] += m_emb;
  }
  for (std::size_t b = 0; b < spec.buckets(); ++b) {
    report.buckets[b].avg_meteor_lex = mean_or_null(sum_lex[b], report.buckets[b].count);
    report.buckets[b].avg_meteor_emb = mean_or_null(sum_emb[b], report.buckets[b].count);
  }
  return report;
}

const char* to_string(StsMode m) noexcept {
  return m == StsMode::query_source ? "query-source" : "reference-target";
}

StsMode parse_sts_mode(std::string_view name) {
  if (name == "query-source") return StsMode::query_source;
  if (name == "reference-target") return StsMode::reference_target;
  throw ArgumentError("unknown sts mode '" + std::string(name) + "'");
}

std::vector<std::optional<double>> mean_sts_per_bucket(std::span<const EvalRow> rows,
                                                       EmbeddingProvider& provider,
                                                       const PartitionSpec& spec, StsMode mode) {
  spec.validate();
  std::vector<double> sum(spec.buckets(), 0.0);
  std::vector<std::size_t> count(spec.buckets(), 0);
  if (!rows.empty()) {
    std::vector<std::string> texts;
    texts.reserve(rows.size() * 2);
    for (const auto& row : rows) {
      if (mode == StsMode::query_source) {
        texts.push_back(row.query);
        texts.push_back(row.emb_match.unit.source_text);
      } else {
        texts.push_back(row.reference);
        texts.push_back(row.emb_match.unit.target_text);
      }
    }
    const auto vectors = embed_batch(provider, texts);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::size_t b = spec.bucket_of(rows[i].lex_fuzzy);
      sum[b] += cosine(vectors[2 * i], vectors[2 * i + 1]);
      ++count[b];
    }
  }
  std::vector<std::optional<double>> out;
  for (std::size_t b = 0; b < spec.buckets(); ++b) out.push_back(mean_or_null(sum[b], count[b]));
  return out;
}

std::string to_json(const TmEvalReport& report) {
  using nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  ordered_json j;
  j["provider"] = report.provider;
  j["normalized"] = report.partition.normalized;
  j["rows"] = report.partition.rows_in;
  j["ties_dropped"] = report.partition.ties_dropped;
  j["retained"] = report.partition.retained();
  j["sts_mode"] = to_string(report.sts_mode);
  ordered_json buckets = ordered_json::array();
  for (std::size_t b = 0; b < report.partition.buckets.size(); ++b) {
    const auto& s = report.partition.buckets[b];
    ordered_json e;
    e["lo"] = s.lo;
    e["hi"] = s.hi;
    e["count"] = s.count;
    e["avg_meteor_lex"] = opt(s.avg_meteor_lex);
    e["avg_meteor_emb"] = opt(s.avg_meteor_emb);
    e["mean_sts"] = b < report.mean_sts.size() ? opt(report.mean_sts[b]) : ordered_json(nullptr);
    buckets.push_back(std::move(e));
  }
  j["buckets"] = std::move(buckets);
  return j.dump();
}

std::string to_table(const TmEvalReport& report) {
  const auto& p = report.partition;
  PartitionSpec spec;
  spec.edges.clear();
  for (const auto& s : p.buckets) spec.edges.push_back(s.lo);
  if (!p.buckets.empty()) spec.edges.push_back(p.buckets.back().hi);

  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %10s %10s %10s %7s\n", "fuzzy", "lexical", "embedding",
                "mean_sts", "count");
  out << line;
  for (std::size_t b = p.buckets.size(); b-- > 0;) {
    const auto& s = p.buckets[b];
    const std::optional<double> sts = b < report.mean_sts.size() ? report.mean_sts[b] : std::nullopt;
    std::snprintf(line, sizeof line, "%-14s %s %s %s %7zu\n", spec.label(b).c_str(),
                  fixed(s.avg_meteor_lex, 10).c_str(), fixed(s.avg_meteor_emb, 10).c_str(),
                  fixed(sts, 10).c_str(), s.count);
    out << line;
  }
  out << "rows " << p.rows_in << ", ties dropped " << p.ties_dropped << ", retained "
      << p.retained() << (p.normalized ? ", normalized" : "") << ", sts "
      << to_string(report.sts_mode) << '\n';
  return out.str();
}

}  // namespace tmr
