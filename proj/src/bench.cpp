#include "tmr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <random>

#include <nlohmann/json.hpp>

#include "tmr/error.hpp"
#include "tmr/vector_index.hpp"

namespace tmr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

EmbeddingVector random_direction(std::mt19937_64& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = 2.0 * unit_draw(rng) - 1.0;
  return EmbeddingVector(std::move(v));
}

void finish(StepTiming& step) { step.median = median(step.samples); }

nlohmann::ordered_json step_json(const StepTiming& s) {
  nlohmann::ordered_json j;
  j["samples"] = s.samples;
  j["median"] = s.median;
  return j;
}

constexpr const char* kWords[] = {
    "the",      "commission", "shall",   "adopt",     "measures", "regulation", "member",
    "states",   "council",    "article", "annex",     "decision", "market",     "product",
    "report",   "period",     "year",    "agreement", "committee", "directive", "public",
    "services", "within",     "under",   "following", "provided", "transport",  "safety",
    "data",     "health",     "energy",  "customs",   "tariff",   "quota",      "aid",
    "approval", "procedure",  "budget",  "funds",     "programme"};

}  // namespace

double median(std::vector<double> samples) {
  if (samples.empty()) throw ArgumentError("median of no samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  if (samples.size() % 2 == 1) return samples[mid];
  return (samples[mid - 1] + samples[mid]) / 2.0;
}

std::vector<std::string> synthetic_sentences(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  constexpr std::size_t vocab = std::size(kWords);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = 6 + rng() % 20;
    std::string s;
    for (std::size_t k = 0; k < len; ++k) {
      if (k) s.push_back(' ');
      s += kWords[rng() % vocab];
    }
    // A serial keeps segments distinct.
    s += ' ';
    s += std::to_string(i);
    out.push_back(std::move(s));
  }
  return out;
}

TimingReport bench_timing(std::size_t n, EmbeddingProvider& provider, std::size_t repetitions) {
  if (n == 0) throw ArgumentError("bench needs n >= 1");
  if (repetitions == 0) throw ArgumentError("bench needs at least one repetition");
  TimingReport report;
  report.n = n;
  report.repetitions = repetitions;
  report.provider = provider.spec().name;

  const auto memory = synthetic_sentences(n);
  const auto queries = synthetic_sentences(repetitions, 99);
  std::vector<EmbeddingVector> vectors;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto start = Clock::now();
    vectors = embed_batch(provider, memory);
    report.embed_memory_total.samples.push_back(seconds_since(start));
  }

  VectorIndex index(provider.spec().dim);
  index.reserve(n);
  std::vector<float> row(provider.spec().dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (vectors[i].is_zero()) continue;
    for (std::size_t d = 0; d < row.size(); ++d) row[d] = static_cast<float>(vectors[i][d]);
    index.add_row(i + 1, row);
  }
  if (index.empty()) throw EmptyIndexError("no embeddable segments");

  for (std::size_t r = 0; r < repetitions; ++r) {
    auto start = Clock::now();
    const auto q = embed_one(provider, queries[r]);
    report.embed_single_query.samples.push_back(seconds_since(start));

    start = Clock::now();
    const auto hits = index.nearest(q, 1);
    report.retrieve_single_query.samples.push_back(seconds_since(start));
    if (hits.empty()) throw EmptyIndexError("retrieval returned nothing");
  }
  finish(report.embed_memory_total);
  finish(report.embed_single_query);
  finish(report.retrieve_single_query);
  return report;
}

RetrievalTiming bench_retrieval(std::size_t n, std::size_t dim, std::size_t repetitions,
                                std::uint64_t seed) {
  if (n == 0 || dim == 0) throw ArgumentError("bench needs n >= 1 and dim >= 1");
  if (repetitions == 0) throw ArgumentError("bench needs at least one repetition");
  std::mt19937_64 rng(seed);
  VectorIndex index(dim);
  index.reserve(n);
  std::vector<float> row(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : row) x = static_cast<float>(2.0 * unit_draw(rng) - 1.0);
    index.add_row(i + 1, row);
  }
  RetrievalTiming out;
  out.n = n;
  out.dim = dim;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto q = random_direction(rng, dim);
    const auto start = Clock::now();
    const auto hits = index.nearest(q, 1);
    out.retrieve.samples.push_back(seconds_since(start));
    if (hits.empty()) throw EmptyIndexError("retrieval returned nothing");
  }
  finish(out.retrieve);
  return out;
}

double scaling_ratio(std::span<const RetrievalTiming> runs) {
  if (runs.empty()) throw ArgumentError("no runs");
  double lo = runs.front().seconds_per_vector();
  double hi = lo;
  for (const auto& r : runs) {
    lo = std::min(lo, r.seconds_per_vector());
    hi = std::max(hi, r.seconds_per_vector());
  }
  return lo > 0.0 ? hi / lo : 1.0;
}

std::string to_json(const TimingReport& report) {
  nlohmann::ordered_json j;
  j["n"] = report.n;
  j["repetitions"] = report.repetitions;
  j["provider"] = report.provider;
  j["embed_memory_total"] = step_json(report.embed_memory_total);
  j["embed_single_query"] = step_json(report.embed_single_query);
  j["retrieve_single_query"] = step_json(report.retrieve_single_query);
  return j.dump();
}

std::string to_json(std::span<const RetrievalTiming> runs) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : runs) {
    nlohmann::ordered_json e;
    e["n"] = r.n;
    e["dim"] = r.dim;
    e["retrieve"] = step_json(r.retrieve);
    e["seconds_per_vector"] = r.seconds_per_vector();
    arr.push_back(std::move(e));
  }
  j["runs"] = std::move(arr);
  j["scaling_ratio"] = runs.empty() ? 1.0 : scaling_ratio(runs);
  return j.dump();
}

}  // namespace tmr
