#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "sbb/bitvec.hpp"
#include "sbb/net.hpp"
#include "sbb/ristretto.hpp"
#include "sbb/sketch.hpp"

namespace sbb {

using Database = std::vector<BitVec>;

struct ServerOptions {
  std::uint32_t k = 2;  // coarse threshold applied by Sim
  /// OPRF key; random when unset (all zero).
  Ristretto255::Scalar oprf_key{};
  /// Write-rate cap per session in bytes/second; 0 = unthrottled. The
  /// benchmark harness uses this to emulate a fixed link on loopback.
  std::uint64_t link_bytes_per_second = 0;
};

/// Serves the two-stage flow: parse request, scan the database snapshot,
/// answer in retrieval or sketch mode. Sessions run one per connection over
/// an immutable snapshot; swap_database exchanges snapshots atomically
/// between sessions.
class Server {
 public:
  Server(Database db, ServerOptions opts);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting. Port 0 picks an ephemeral port.
  void start(const std::string& host, std::uint16_t port);
  void stop();

  std::uint16_t port() const;

  void swap_database(Database db);
  std::size_t database_size() const;

 private:
  void accept_loop();
  void session(net::Stream stream);
  std::shared_ptr<const Database> snapshot() const;

  mutable std::mutex mu_;
  std::shared_ptr<const Database> db_;
  ServerOptions opts_;
  SketchCode code_;
  std::unique_ptr<net::Listener> listener_;
  std::thread acceptor_;
  std::atomic<std::size_t> active_sessions_{0};
  std::atomic<bool> running_{false};
};

}  // namespace sbb
