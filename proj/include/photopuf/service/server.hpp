#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "photopuf/service/device.hpp"

namespace photopuf::service {

struct ListenAddress {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

/// Parses "host:port" or ":port".
ListenAddress parse_listen_address(const std::string& text);

/// Framed TCP front end, one thread per connection.
///
/// A frame whose payload does not arrive within `frame_timeout` gets an
/// ERROR bad_frame reply; the partial bytes are dropped and the connection
/// keeps reading. A length prefix above the payload limit also gets
/// bad_frame, after which the connection is closed.
class Server {
 public:
  Server(Device& device, ListenAddress address,
         std::chrono::milliseconds frame_timeout = std::chrono::milliseconds(1000));
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds, listens and starts the accept thread. Returns the bound port.
  std::uint16_t start();
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

  std::uint16_t port() const { return port_; }

 private:
  void accept_loop();
  void serve(int fd);
  void reap_finished();

  struct Connection {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };

  Device& device_;
  ListenAddress address_;
  std::chrono::milliseconds frame_timeout_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex conn_mutex_;
  std::list<Connection> connections_;
  std::list<int> open_fds_;
};

/// Blocking client for one connection.
class Client {
 public:
  Client(const std::string& host, std::uint16_t port);
  ~Client();

  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  Message request(const Message& msg);
  void send_raw(std::span<const std::uint8_t> bytes);
  /// Reads one frame; throws on timeout or closed connection.
  Message receive(std::chrono::milliseconds timeout = std::chrono::milliseconds(30000));

 private:
  int fd_ = -1;
};

}  // namespace photopuf::service
