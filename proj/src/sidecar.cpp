#include "tmr/sidecar.hpp"

#include <cerrno>
#include <csignal>
#include <cstdlib>
#include <cstring>

#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "tmr/error.hpp"

namespace tmr {

namespace {

using nlohmann::json;

// Provider errors raised here carry index 0; embed_batch rewrites the index
// to the failing batch's first text.
[[noreturn]] void fail(const std::string& what) { throw ProviderError(0, what); }

}  // namespace

std::string sidecar_command(const std::string& fallback) {
  if (const char* env = std::getenv("TMR_SIDECAR_CMD"); env && *env) return env;
  return fallback;
}

SidecarProvider::SidecarProvider(const std::string& command, std::size_t batch_size) {
  if (command.empty()) fail("empty sidecar command");
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    fail(std::string("socketpair: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    fail(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(fds[1], STDIN_FILENO);
    ::dup2(fds[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(fds[1]);
  fd_ = fds[0];
  pid_ = pid;

  try {
    const auto reply = json::parse(request(json{{"op", "info"}, {"id", 0}}.dump()));
    if (!reply.is_object()) fail("sidecar info reply is not an object");
    if (reply.contains("error")) fail("sidecar info failed: " + reply["error"].dump());
    if (!reply.contains("id") || reply["id"] != 0) fail("sidecar info reply id does not match");
    if (!reply.contains("dim") || !reply["dim"].is_number_unsigned() ||
        reply["dim"].get<std::size_t>() == 0) {
      fail("sidecar info reply lacks a positive dim");
    }
    model_ = reply.value("model", std::string("unknown"));
    spec_ = EmbedderSpec{"sidecar:" + model_, reply["dim"].get<std::size_t>(), batch_size};
    spec_.validate();
  } catch (const json::exception& e) {
    shutdown_child();
    fail(std::string("malformed sidecar reply: ") + e.what());
  } catch (...) {
    shutdown_child();
    throw;
  }
}

SidecarProvider::~SidecarProvider() { shutdown_child(); }

void SidecarProvider::shutdown_child() noexcept {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_WR);
    ::close(fd_);
    fd_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    // Closing the stream is the shutdown signal; give the child a moment
    // before forcing it.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        ::kill(-pid_, SIGKILL);
        pid_ = -1;
        return;
      }
      ::usleep(20000);
    }
    // The command runs under sh, so signal the whole group.
    ::kill(-pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

std::string SidecarProvider::request(const std::string& line) {
  if (fd_ < 0) fail("sidecar is not running");
  std::string out = line;
  out.push_back('\n');
  std::size_t sent = 0;
  while (sent < out.size()) {
    const ssize_t n = ::send(fd_, out.data() + sent, out.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(std::string("write to sidecar failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
  for (;;) {
    if (const auto nl = pending_.find('\n'); nl != std::string::npos) {
      std::string reply = pending_.substr(0, nl);
      pending_.erase(0, nl + 1);
      return reply;
    }
    char buf[65536];
    const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(std::string("read from sidecar failed: ") + std::strerror(errno));
    }
    if (n == 0) fail("sidecar closed its output");
    pending_.append(buf, static_cast<std::size_t>(n));
  }
}

std::vector<EmbeddingVector> SidecarProvider::embed(std::span<const std::string> texts) {
  std::lock_guard lock(mutex_);
  const std::int64_t id = next_id_++;
  json req = {{"op", "embed"}, {"id", id}, {"texts", json::array()}};
  for (const auto& t : texts) req["texts"].push_back(t);

  json reply;
  try {
    reply = json::parse(request(req.dump()));
  } catch (const json::exception& e) {
    fail(std::string("malformed sidecar reply: ") + e.what());
  }
  if (!reply.is_object()) fail("sidecar reply is not an object");
  if (reply.contains("error")) fail("sidecar error: " + reply["error"].dump());
  if (!reply.contains("id") || reply["id"] != id) {
    fail("sidecar reply id does not match request " + std::to_string(id));
  }
  if (!reply.contains("vectors") || !reply["vectors"].is_array()) {
    fail("sidecar reply lacks vectors");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(reply["vectors"].size());
  try {
    for (const auto& v : reply["vectors"]) out.emplace_back(v.get<std::vector<double>>());
  } catch (const json::exception& e) {
    fail(std::string("bad vector in sidecar reply: ") + e.what());
  }
  return out;
}

}  // namespace tmr
