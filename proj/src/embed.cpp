#include "tmr/embed.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tmr/error.hpp"
#include "tmr/text.hpp"

namespace tmr {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw ArgumentError("embedding vector must have dim > 0");
  for (double v : values_) {
    if (!std::isfinite(v)) throw ArgumentError("embedding vector has a non-finite value");
  }
}

EmbeddingVector EmbeddingVector::from_floats(std::span<const float> values) {
  return EmbeddingVector(std::vector<double>(values.begin(), values.end()));
}

double EmbeddingVector::norm() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

bool EmbeddingVector::is_zero() const noexcept {
  for (double v : values_) {
    if (v != 0.0) return false;
  }
  return true;
}

void EmbedderSpec::validate() const {
  if (dim == 0) throw ArgumentError("embedder dim must be positive");
  if (batch_size == 0) throw ArgumentError("batch size must be at least 1");
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) throw DimensionError(a.dim(), b.dim());
  double dot = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    dot += av[i] * bv[i];
    aa += av[i] * av[i];
    bb += bv[i] * bv[i];
  }
  if (aa == 0.0 || bb == 0.0) throw DegenerateVectorError("cosine of a zero-norm vector");
  // sqrt(aa * bb) is exactly aa when a == b, so identical vectors give 1.0.
  const double c = dot / std::sqrt(aa * bb);
  return std::clamp(c, -1.0, 1.0);
}

std::vector<EmbeddingVector> embed_batch(EmbeddingProvider& provider,
                                         std::span<const std::string> texts) {
  if (texts.empty()) throw ArgumentError("embed_batch: no texts");
  const auto& spec = provider.spec();
  spec.validate();
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += spec.batch_size) {
    const std::size_t count = std::min(spec.batch_size, texts.size() - start);
    std::vector<EmbeddingVector> chunk;
    try {
      chunk = provider.embed(texts.subspan(start, count));
    } catch (const ProviderError& e) {
      throw ProviderError(start + e.first_index(), e.detail());
    } catch (const std::exception& e) {
      throw ProviderError(start, e.what());
    }
    if (chunk.size() != count) {
      throw ProviderError(start, "expected " + std::to_string(count) + " vectors, got " +
                                     std::to_string(chunk.size()));
    }
    for (auto& v : chunk) {
      if (v.dim() != spec.dim) throw DimensionError(spec.dim, v.dim());
      out.push_back(std::move(v));
    }
  }
  return out;
}

EmbeddingVector embed_one(EmbeddingProvider& provider, const std::string& text) {
  auto v = embed_batch(provider, std::span<const std::string>(&text, 1));
  return std::move(v.front());
}

EmbeddingVector deterministic_embed(std::string_view text, std::size_t dim) {
  if (dim == 0) throw ArgumentError("dim must be positive");
  const auto tokens = text::split_whitespace(text::to_lower(text));
  std::vector<double> acc(dim, 0.0);
  if (tokens.empty()) return EmbeddingVector(std::move(acc));
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  for (const auto& tok : tokens) {
    std::mt19937_64 gen(text::fnv1a64(tok));
    for (std::size_t i = 0; i < dim; ++i) {
      const double u = static_cast<double>(gen() >> 11) * kScale;
      acc[i] += 2.0 * u - 1.0;
    }
  }
  const double n = static_cast<double>(tokens.size());
  double sq = 0.0;
  for (auto& v : acc) {
    v /= n;
    sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (norm > 0.0) {
    for (auto& v : acc) v /= norm;
  }
  return EmbeddingVector(std::move(acc));
}

DeterministicProvider::DeterministicProvider(std::size_t dim, std::size_t batch_size)
    : spec_{"deterministic-fnv1a-mt19937", dim, batch_size} {
  spec_.validate();
}

std::vector<EmbeddingVector> DeterministicProvider::embed(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(deterministic_embed(t, spec_.dim));
  return out;
}

}  // namespace tmr
