#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tmr/embed.hpp"

namespace tmr {

/// Middle value; the mean of the two middle values for an even count.
/// Throws ArgumentError on empty input.
double median(std::vector<double> samples);

struct StepTiming {
  std::vector<double> samples;  // seconds
  double median = 0.0;
};

struct TimingReport {
  std::size_t n = 0;
  std::size_t repetitions = 0;
  std::string provider;
  StepTiming embed_memory_total;
  StepTiming embed_single_query;
  StepTiming retrieve_single_query;
};

/// Deterministic pseudo-sentences for memory-sized benchmarks.
std::vector<std::string> synthetic_sentences(std::size_t n, std::uint64_t seed = 1);

/// Times the three steps of a lookup on `n` synthetic segments: embedding
/// the memory in requests of the provider's batch size, embedding one query,
/// and retrieving its nearest neighbour. Runs sequentially.
TimingReport bench_timing(std::size_t n, EmbeddingProvider& provider, std::size_t repetitions);

struct RetrievalTiming {
  std::size_t n = 0;
  std::size_t dim = 0;
  StepTiming retrieve;
  double seconds_per_vector() const { return retrieve.median / static_cast<double>(n); }
};

/// Top-1 retrieval over `n` random unit vectors of `dim` components, one
/// query per repetition.
RetrievalTiming bench_retrieval(std::size_t n, std::size_t dim, std::size_t repetitions,
                                std::uint64_t seed = 7);

/// Largest over smallest per-vector median time across `runs`.
double scaling_ratio(std::span<const RetrievalTiming> runs);

std::string to_json(const TimingReport& report);
std::string to_json(std::span<const RetrievalTiming> runs);

}  // namespace tmr
