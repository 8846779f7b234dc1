#pragma once

// One-shot framed TCP transfer: u32 big-endian length || payload bytes.
// The sender can pace itself to simulate a low-bandwidth link.

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>

#include "latentseal/error.hpp"
#include "latentseal/file_io.hpp"

namespace latentseal {

inline constexpr std::size_t kMaxFrameBytes = 16u * 1024u * 1024u;

/// Owning socket descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Socket& operator=(Socket&& other) noexcept {
    if (this != &other) {
      reset();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { reset(); }

  int fd() const noexcept { return fd_; }
  explicit operator bool() const noexcept { return fd_ >= 0; }

  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

namespace detail {

inline std::string errno_text() { return std::strerror(errno); }

inline void send_all(int fd, const std::uint8_t* data, std::size_t len) {
  while (len > 0) {
    const ssize_t n = ::send(fd, data, len, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorKind::ConnectionError, "send failed: " + errno_text());
    }
    data += n;
    len -= static_cast<std::size_t>(n);
  }
}

inline void recv_all(int fd, std::uint8_t* data, std::size_t len) {
  while (len > 0) {
    const ssize_t n = ::recv(fd, data, len, 0);
    if (n == 0) fail(ErrorKind::ConnectionError, "peer closed the connection mid-frame");
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorKind::ConnectionError, "recv failed: " + errno_text());
    }
    data += n;
    len -= static_cast<std::size_t>(n);
  }
}

inline void set_timeout(int fd, std::chrono::milliseconds timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

}  // namespace detail

inline Bytes encode_frame(std::span<const std::uint8_t> payload) {
  if (payload.size() > kMaxFrameBytes) fail(ErrorKind::FrameTooLarge, "payload exceeds the 16 MiB frame limit");
  const auto n = static_cast<std::uint32_t>(payload.size());
  Bytes frame(4 + payload.size());
  frame[0] = static_cast<std::uint8_t>(n >> 24);
  frame[1] = static_cast<std::uint8_t>(n >> 16);
  frame[2] = static_cast<std::uint8_t>(n >> 8);
  frame[3] = static_cast<std::uint8_t>(n);
  std::copy(payload.begin(), payload.end(), frame.begin() + 4);
  return frame;
}

inline Socket connect_to(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &found) != 0 || found == nullptr) {
    fail(ErrorKind::ConnectionError, "cannot resolve '" + host + "'");
  }
  Socket sock;
  for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
    Socket candidate(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (candidate && ::connect(candidate.fd(), ai->ai_addr, ai->ai_addrlen) == 0) {
      sock = std::move(candidate);
      break;
    }
  }
  ::freeaddrinfo(found);
  if (!sock) fail(ErrorKind::ConnectionError, "cannot connect to " + host + ":" + service);
  return sock;
}

/// Sends one frame. With `bytes_per_second`, the frame (prefix included) is
/// paced so the transfer takes about size / rate seconds.
inline void send_frame(const std::string& host, std::uint16_t port, std::span<const std::uint8_t> payload,
                       std::optional<double> bytes_per_second = std::nullopt) {
  const Bytes frame = encode_frame(payload);
  Socket sock = connect_to(host, port);
  if (!bytes_per_second) {
    detail::send_all(sock.fd(), frame.data(), frame.size());
    return;
  }
  const double rate = *bytes_per_second;
  if (!(rate > 0.0)) fail(ErrorKind::InvalidArgument, "throttle rate must be positive");
  const int nodelay = 1;
  ::setsockopt(sock.fd(), IPPROTO_TCP, TCP_NODELAY, &nodelay, sizeof(nodelay));
  const std::size_t chunk = std::max<std::size_t>(1, static_cast<std::size_t>(rate / 50.0));
  const auto start = std::chrono::steady_clock::now();
  std::size_t sent = 0;
  while (sent < frame.size()) {
    const std::size_t n = std::min(chunk, frame.size() - sent);
    detail::send_all(sock.fd(), frame.data() + sent, n);
    sent += n;
    const auto due = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                 std::chrono::duration<double>(static_cast<double>(sent) / rate));
    std::this_thread::sleep_until(due);
  }
}

/// Listening socket that accepts exactly one framed transfer.
class FrameListener {
 public:
  /// Port 0 picks an ephemeral port; see port().
  explicit FrameListener(std::uint16_t port, const std::string& bind_address = "0.0.0.0") {
    sock_ = Socket(::socket(AF_INET, SOCK_STREAM, 0));
    if (!sock_) fail(ErrorKind::ConnectionError, "socket() failed: " + detail::errno_text());
    const int yes = 1;
    ::setsockopt(sock_.fd(), SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1) {
      fail(ErrorKind::InvalidArgument, "bad bind address '" + bind_address + "'");
    }
    if (::bind(sock_.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      fail(ErrorKind::ConnectionError, "bind failed: " + detail::errno_text());
    }
    if (::listen(sock_.fd(), 1) != 0) fail(ErrorKind::ConnectionError, "listen failed: " + detail::errno_text());
    socklen_t len = sizeof(addr);
    ::getsockname(sock_.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
  }

  std::uint16_t port() const noexcept { return port_; }

  /// Accepts one connection and reads one frame. Oversized length prefixes are
  /// rejected before any payload is buffered.
  Bytes receive_one(std::optional<std::chrono::milliseconds> timeout = std::nullopt) {
    if (timeout) {
      pollfd pfd{sock_.fd(), POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(timeout->count()));
      if (ready <= 0) fail(ErrorKind::ConnectionError, "timed out waiting for a sender");
    }
    Socket conn(::accept(sock_.fd(), nullptr, nullptr));
    if (!conn) fail(ErrorKind::ConnectionError, "accept failed: " + detail::errno_text());
    if (timeout) detail::set_timeout(conn.fd(), *timeout);
    std::uint8_t prefix[4];
    detail::recv_all(conn.fd(), prefix, sizeof(prefix));
    const std::size_t len = static_cast<std::size_t>(prefix[0]) << 24 | static_cast<std::size_t>(prefix[1]) << 16 |
                            static_cast<std::size_t>(prefix[2]) << 8 | static_cast<std::size_t>(prefix[3]);
    if (len > kMaxFrameBytes) fail(ErrorKind::FrameTooLarge, "frame of " + std::to_string(len) + " bytes refused");
    Bytes payload(len);
    detail::recv_all(conn.fd(), payload.data(), len);
    return payload;
  }

 private:
  Socket sock_;
  std::uint16_t port_ = 0;
};

}  // namespace latentseal
