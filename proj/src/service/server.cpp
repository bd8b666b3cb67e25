#include "photopuf/service/server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <system_error>

#include "photopuf/common/errors.hpp"

namespace photopuf::service {

namespace {

using Clock = std::chrono::steady_clock;

enum class ReadStatus { ok, timeout, closed, stopped };

[[noreturn]] void sys_error(const char* what) {
  throw std::system_error(errno, std::generic_category(), what);
}

// Reads exactly buf.size() bytes. `deadline` of nullopt waits indefinitely
// (checking `running` every 200 ms).
ReadStatus read_exact(int fd, std::span<std::uint8_t> buf, std::optional<Clock::time_point> deadline,
                      const std::atomic<bool>* running) {
  std::size_t got = 0;
  while (got < buf.size()) {
    int wait_ms = 200;
    if (deadline) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(*deadline - Clock::now());
      if (left.count() <= 0) return ReadStatus::timeout;
      wait_ms = static_cast<int>(std::min<long long>(left.count(), 200));
    }
    if (running && !running->load()) return ReadStatus::stopped;
    pollfd p{fd, POLLIN, 0};
    const int rc = ::poll(&p, 1, wait_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      return ReadStatus::closed;
    }
    if (rc == 0) continue;
    const auto n = ::recv(fd, buf.data() + got, buf.size() - got, 0);
    if (n == 0) return ReadStatus::closed;
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      return ReadStatus::closed;
    }
    got += static_cast<std::size_t>(n);
  }
  return ReadStatus::ok;
}

bool write_all(int fd, std::span<const std::uint8_t> data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const auto n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

}  // namespace

ListenAddress parse_listen_address(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw InvalidArgument("listen address must be host:port");
  ListenAddress a;
  if (colon > 0) a.host = text.substr(0, colon);
  const auto port_text = text.substr(colon + 1);
  try {
    std::size_t used = 0;
    const auto port = std::stoul(port_text, &used);
    if (used != port_text.size() || port > 65535) throw std::out_of_range("port");
    a.port = static_cast<std::uint16_t>(port);
  } catch (const std::logic_error&) {
    throw InvalidArgument("bad port in listen address '" + text + "'");
  }
  return a;
}

Server::Server(Device& device, ListenAddress address, std::chrono::milliseconds frame_timeout)
    : device_(device), address_(std::move(address)), frame_timeout_(frame_timeout) {}

Server::~Server() { stop(); }

std::uint16_t Server::start() {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const auto port_text = std::to_string(address_.port);
  if (::getaddrinfo(address_.host.c_str(), port_text.c_str(), &hints, &res) != 0 || !res)
    throw InvalidArgument("cannot resolve listen host '" + address_.host + "'");
  listen_fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (listen_fd_ < 0) {
    ::freeaddrinfo(res);
    sys_error("socket");
  }
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(listen_fd_, res->ai_addr, res->ai_addrlen) != 0) {
    ::freeaddrinfo(res);
    ::close(listen_fd_);
    listen_fd_ = -1;
    sys_error("bind");
  }
  ::freeaddrinfo(res);
  if (::listen(listen_fd_, 64) != 0) sys_error("listen");
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
  return port_;
}

void Server::accept_loop() {
  while (running_) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, 200);
    if (rc <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    set_nodelay(fd);
    reap_finished();
    std::lock_guard lock(conn_mutex_);
    open_fds_.push_back(fd);
    auto done = std::make_shared<std::atomic<bool>>(false);
    connections_.push_back({std::thread([this, fd, done] {
                              serve(fd);
                              *done = true;
                            }),
                            done});
  }
}

void Server::reap_finished() {
  std::list<Connection> finished;
  {
    std::lock_guard lock(conn_mutex_);
    for (auto it = connections_.begin(); it != connections_.end();) {
      if (*it->done) {
        finished.splice(finished.end(), connections_, it++);
      } else {
        ++it;
      }
    }
  }
  for (auto& c : finished) c.thread.join();
}

void Server::serve(int fd) {
  std::array<std::uint8_t, 4> header{};
  while (running_) {
    if (read_exact(fd, header, std::nullopt, &running_) != ReadStatus::ok) break;
    const auto len = be32(header.data());
    if (len > kMaxPayload) {
      write_all(fd, encode_frame(ErrorReply{ErrorCode::bad_frame, "payload too large"}));
      break;
    }
    std::vector<std::uint8_t> payload(len);
    const auto st = read_exact(fd, payload, Clock::now() + frame_timeout_, &running_);
    if (st == ReadStatus::timeout) {
      if (!write_all(fd, encode_frame(ErrorReply{ErrorCode::bad_frame, "incomplete frame"}))) break;
      continue;
    }
    if (st != ReadStatus::ok) break;
    const auto reply = device_.handle_payload(payload);
    if (!write_all(fd, encode_frame(reply))) break;
  }
  std::lock_guard lock(conn_mutex_);
  open_fds_.remove(fd);
  ::close(fd);
}

void Server::stop() {
  if (!running_.exchange(false)) {
    if (acceptor_.joinable()) acceptor_.join();
    return;
  }
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::lock_guard lock(conn_mutex_);
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  std::list<Connection> threads;
  {
    std::lock_guard lock(conn_mutex_);
    threads.swap(connections_);
  }
  for (auto& c : threads)
    if (c.thread.joinable()) c.thread.join();
  if (listen_fd_ >= 0) ::close(listen_fd_);
  listen_fd_ = -1;
}

void Server::wait() {
  while (running_) std::this_thread::sleep_for(std::chrono::milliseconds(200));
}

Client::Client(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const auto port_text = std::to_string(port);
  if (::getaddrinfo(host.c_str(), port_text.c_str(), &hints, &res) != 0 || !res)
    throw InvalidArgument("cannot resolve host '" + host + "'");
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0 || ::connect(fd_, res->ai_addr, res->ai_addrlen) != 0) {
    ::freeaddrinfo(res);
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
    sys_error("connect");
  }
  ::freeaddrinfo(res);
  set_nodelay(fd_);
}

Client::~Client() {
  if (fd_ >= 0) ::close(fd_);
}

void Client::send_raw(std::span<const std::uint8_t> bytes) {
  if (!write_all(fd_, bytes)) sys_error("send");
}

Message Client::receive(std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  std::array<std::uint8_t, 4> header{};
  if (read_exact(fd_, header, deadline, nullptr) != ReadStatus::ok)
    throw std::runtime_error("connection closed or timed out");
  std::vector<std::uint8_t> payload(be32(header.data()));
  if (payload.size() > kMaxPayload) throw std::runtime_error("reply too large");
  if (read_exact(fd_, payload, deadline, nullptr) != ReadStatus::ok)
    throw std::runtime_error("connection closed or timed out");
  return decode_payload(payload);
}

Message Client::request(const Message& msg) {
  send_raw(encode_frame(msg));
  return receive();
}

}  // namespace photopuf::service
