#pragma once

#include <cstdint>
#include <mutex>
#include <string>

#include "tmr/embed.hpp"

namespace tmr {

/// Embedding provider backed by a child process speaking newline-delimited
/// JSON on its standard streams:
///
///   -> {"op":"info","id":N}
///   <- {"id":N,"dim":D,"model":"..."}
///   -> {"op":"embed","id":N,"texts":[...]}
///   <- {"id":N,"dim":D,"vectors":[[...],...]}   or   {"id":N,"error":"..."}
///
/// The child is started with `/bin/sh -c command`. Requests are serialised;
/// the provider may be shared between threads.
class SidecarProvider final : public EmbeddingProvider {
 public:
  /// Launches the child and performs the info handshake. Throws
  /// ProviderError when the process cannot start or the handshake fails.
  explicit SidecarProvider(const std::string& command,
                           std::size_t batch_size = kDefaultBatchSize);
  ~SidecarProvider() override;

  SidecarProvider(const SidecarProvider&) = delete;
  SidecarProvider& operator=(const SidecarProvider&) = delete;

  const EmbedderSpec& spec() const override { return spec_; }
  const std::string& model() const noexcept { return model_; }

  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;

 private:
  std::string request(const std::string& line);
  void shutdown_child() noexcept;

  EmbedderSpec spec_;
  std::string model_;
  int fd_ = -1;
  int pid_ = -1;
  std::int64_t next_id_ = 1;
  std::string pending_;
  std::mutex mutex_;
};

/// Resolves the sidecar command: TMR_SIDECAR_CMD when set, `fallback`
/// otherwise.
std::string sidecar_command(const std::string& fallback);

}  // namespace tmr
