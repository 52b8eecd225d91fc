#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tmr/vector.hpp"

namespace tmr {

inline constexpr std::size_t kDefaultDim = 512;
inline constexpr std::size_t kDefaultBatchSize = 256;

struct EmbedderSpec {
  std::string name;
  std::size_t dim = kDefaultDim;
  std::size_t batch_size = kDefaultBatchSize;

  /// Throws ArgumentError unless dim and batch_size are positive.
  void validate() const;
};

/// Something that turns sentences into vectors: the deterministic test
/// embedder or a sentence encoder behind the sidecar protocol.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual const EmbedderSpec& spec() const = 0;

  /// Embeds one request. Implementations may assume the caller already
  /// chunked `texts` to at most spec().batch_size entries.
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) = 0;
};

/// Cosine similarity: dot(a, b) / (|a| |b|), accumulated in double precision
/// and clamped to [-1, 1]. Symmetric bit-for-bit.
///
/// Throws DimensionError on mismatched dimensions and DegenerateVectorError
/// when either argument has zero norm.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

/// Embeds `texts` in order, issuing requests of at most spec().batch_size
/// texts. Any failure inside a request is rethrown as ProviderError carrying
/// the index of that request's first text; a vector of the wrong length
/// raises DimensionError. Throws ArgumentError on an empty list.
std::vector<EmbeddingVector> embed_batch(EmbeddingProvider& provider,
                                         std::span<const std::string> texts);

EmbeddingVector embed_one(EmbeddingProvider& provider, const std::string& text);

/// Hash-seeded bag-of-words embedding used as a deterministic stand-in for a
/// sentence encoder.
///
/// The text is lowercased and split on whitespace. Each token seeds an
/// mt19937_64 with the FNV-1a 64 hash of its UTF-8 bytes; `dim` draws
/// x >> 11 scaled by 2^-53 give u in [0, 1), mapped to 2u - 1. Token vectors
/// are averaged and L2-normalised. Text without tokens yields the zero
/// vector, which cosine() rejects.
EmbeddingVector deterministic_embed(std::string_view text, std::size_t dim = kDefaultDim);

class DeterministicProvider final : public EmbeddingProvider {
 public:
  explicit DeterministicProvider(std::size_t dim = kDefaultDim,
                                 std::size_t batch_size = kDefaultBatchSize);

  const EmbedderSpec& spec() const override { return spec_; }
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;

 private:
  EmbedderSpec spec_;
};

}  // namespace tmr
