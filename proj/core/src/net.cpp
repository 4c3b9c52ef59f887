#include "sbb/net.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>
#include <thread>

#include "sbb/errors.hpp"

namespace sbb::net {

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw Error(what + ": " + std::strerror(errno));
}

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (host.empty() || host == "*") {
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
  } else if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw Error("net: invalid IPv4 address: " + host);
  }
  return addr;
}

}  // namespace

Stream& Stream::operator=(Stream&& o) noexcept {
  if (this != &o) {
    close();
    fd_ = o.fd_;
    rate_ = o.rate_;
    o.fd_ = -1;
  }
  return *this;
}

Stream::~Stream() { close(); }

void Stream::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

Stream Stream::connect(const std::string& host, std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) fail("net: socket");
  const auto addr = make_addr(host.empty() ? "127.0.0.1" : host, port);
  if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    const int e = errno;
    ::close(fd);
    errno = e;
    fail("net: connect");
  }
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return Stream(fd);
}

void Stream::write_all(std::span<const std::uint8_t> data) {
  if (fd_ < 0) throw Error("net: write on closed stream");
  std::size_t off = 0;
  const auto start = std::chrono::steady_clock::now();
  while (off < data.size()) {
    std::size_t chunk = data.size() - off;
    if (rate_ > 0) chunk = std::min<std::size_t>(chunk, 256 * 1024);
    const ssize_t n = ::send(fd_, data.data() + off, chunk, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail("net: send");
    }
    off += static_cast<std::size_t>(n);
    if (rate_ > 0) {
      // Pace so that off bytes take off/rate seconds from the first write.
      const auto due = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                   std::chrono::duration<double>(
                                       static_cast<double>(off) / static_cast<double>(rate_)));
      std::this_thread::sleep_until(due);
    }
  }
}

void Stream::read_all(std::span<std::uint8_t> data) {
  if (fd_ < 0) throw Error("net: read on closed stream");
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::recv(fd_, data.data() + off, data.size() - off, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail("net: recv");
    }
    if (n == 0) throw Error("net: connection closed mid-frame");
    off += static_cast<std::size_t>(n);
  }
}

void Stream::write_frame(std::span<const std::uint8_t> payload) {
  std::uint8_t hdr[4];
  const auto n = static_cast<std::uint32_t>(payload.size());
  hdr[0] = static_cast<std::uint8_t>(n >> 24);
  hdr[1] = static_cast<std::uint8_t>(n >> 16);
  hdr[2] = static_cast<std::uint8_t>(n >> 8);
  hdr[3] = static_cast<std::uint8_t>(n);
  write_all(hdr);
  write_all(payload);
}

std::vector<std::uint8_t> Stream::read_frame(std::size_t max_payload) {
  std::uint8_t hdr[4];
  read_all(hdr);
  const std::uint32_t n = (std::uint32_t{hdr[0]} << 24) | (std::uint32_t{hdr[1]} << 16) |
                          (std::uint32_t{hdr[2]} << 8) | std::uint32_t{hdr[3]};
  if (n > max_payload) throw ParseError("net: frame exceeds payload limit");
  std::vector<std::uint8_t> payload(n);
  read_all(payload);
  return payload;
}

Listener::Listener(const std::string& host, std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) fail("net: socket");
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  auto addr = make_addr(host, port);
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    const int e = errno;
    ::close(fd_);
    fd_ = -1;
    errno = e;
    fail("net: bind");
  }
  if (::listen(fd_, 64) != 0) {
    const int e = errno;
    ::close(fd_);
    fd_ = -1;
    errno = e;
    fail("net: listen");
  }
  socklen_t len = sizeof addr;
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) == 0)
    port_ = ntohs(addr.sin_port);
}

Listener::~Listener() {
  if (fd_ >= 0) ::close(fd_);
}

Stream Listener::accept() {
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) fail("net: accept");
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return Stream(fd);
}

void Listener::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

}  // namespace sbb::net
