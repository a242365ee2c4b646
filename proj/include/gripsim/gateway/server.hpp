#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "gripsim/gateway/session.hpp"

namespace gripsim::gateway {

inline constexpr std::uint16_t kDefaultPort = 7420;

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = kDefaultPort;  // 0 picks a free port
  /// When set, each closed session segment is written here as a replayable scenario.
  std::optional<std::filesystem::path> event_log_dir;
  harness::Scenario base = default_live_scenario();
  unsigned threads = 1;
  int max_catchup_ticks = 10;
};

/// WebSocket gateway. Connecting to `/` or `/session` creates a fresh paced
/// session; `/session/<id>` attaches to a live one. Every text frame is one
/// JSON message with the wire schema documented in the README.
class Server {
 public:
  explicit Server(ServerOptions opts);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds, starts the worker threads and returns the bound port.
  std::uint16_t start();
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Writes `s` as `<dir>/<s.name>.json` atomically. Throws IoFailure.
void write_event_log(const std::filesystem::path& dir, const harness::Scenario& s);

}  // namespace gripsim::gateway
