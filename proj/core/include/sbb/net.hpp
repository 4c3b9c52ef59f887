#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sbb::net {

/// One reliable ordered byte stream (TCP). Owns the file descriptor.
class Stream {
 public:
  Stream() = default;
  explicit Stream(int fd) : fd_(fd) {}
  Stream(Stream&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  Stream& operator=(Stream&& o) noexcept;
  Stream(const Stream&) = delete;
  Stream& operator=(const Stream&) = delete;
  ~Stream();

  static Stream connect(const std::string& host, std::uint16_t port);

  bool open() const { return fd_ >= 0; }
  void close();

  void write_all(std::span<const std::uint8_t> data);
  void read_all(std::span<std::uint8_t> data);  // throws on EOF

  /// Length-prefixed frame I/O (4-byte big-endian payload size).
  void write_frame(std::span<const std::uint8_t> payload);
  std::vector<std::uint8_t> read_frame(std::size_t max_payload);

  /// Byte-rate cap applied to writes; 0 disables. Used by the benchmark
  /// harness to emulate a fixed-capacity link on loopback.
  void set_write_rate_limit(std::uint64_t bytes_per_second) { rate_ = bytes_per_second; }

 private:
  int fd_ = -1;
  std::uint64_t rate_ = 0;
};

class Listener {
 public:
  /// Binds and listens on host:port. Port 0 picks an ephemeral port.
  Listener(const std::string& host, std::uint16_t port);
  ~Listener();
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  std::uint16_t port() const { return port_; }
  Stream accept();
  void shutdown();  // unblocks accept()

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace sbb::net
