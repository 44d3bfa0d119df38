// Minimal in-process MQTT 3.1.1 broker for loopback tests: CONNECT/CONNACK,
// SUBSCRIBE/SUBACK, QoS 0 PUBLISH fan-out to matching subscribers, PINGREQ.
// Just enough protocol to exercise the real-broker client end to end.
#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <cstring>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "syncdrive/cam.hpp"

namespace testsupport {

class MqttTestBroker {
 public:
  MqttTestBroker() {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (listen_fd_ < 0 || ::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        ::listen(listen_fd_, 8) != 0) {
      throw std::runtime_error("test broker: cannot listen on loopback");
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    accept_thread_ = std::thread([this] { accept_loop(); });
  }

  ~MqttTestBroker() { stop(); }

  int port() const { return port_; }
  std::string uri() const { return "tcp://127.0.0.1:" + std::to_string(port_); }

  void stop() {
    if (stopping_.exchange(true)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    {
      std::lock_guard lock(mutex_);
      for (auto& c : clients_) ::shutdown(c->fd, SHUT_RDWR);
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    for (auto& t : handlers_) {
      if (t.joinable()) t.join();
    }
    std::lock_guard lock(mutex_);
    for (auto& c : clients_) ::close(c->fd);
    clients_.clear();
  }

 private:
  struct Client {
    int fd;
    std::vector<std::string> filters;
  };

  void accept_loop() {
    for (;;) {
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) break;
      auto client = std::make_shared<Client>();
      client->fd = fd;
      {
        std::lock_guard lock(mutex_);
        clients_.push_back(client);
        handlers_.emplace_back([this, client] { handle(client); });
      }
    }
  }

  static bool read_exact(int fd, std::uint8_t* buf, std::size_t len) {
    std::size_t got = 0;
    while (got < len) {
      const ssize_t n = ::recv(fd, buf + got, len - got, 0);
      if (n <= 0) return false;
      got += static_cast<std::size_t>(n);
    }
    return true;
  }

  void send_all(int fd, const std::vector<std::uint8_t>& bytes) {
    std::lock_guard lock(write_mutex_);
    std::size_t sent = 0;
    while (sent < bytes.size()) {
      const ssize_t n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) return;
      sent += static_cast<std::size_t>(n);
    }
  }

  void handle(const std::shared_ptr<Client>& client) {
    const int fd = client->fd;
    for (;;) {
      std::uint8_t first = 0;
      if (!read_exact(fd, &first, 1)) break;
      std::size_t remaining = 0, multiplier = 1;
      bool ok = false;
      for (int i = 0; i < 4; ++i) {
        std::uint8_t byte = 0;
        if (!read_exact(fd, &byte, 1)) break;
        remaining += static_cast<std::size_t>(byte & 0x7F) * multiplier;
        if ((byte & 0x80) == 0) {
          ok = true;
          break;
        }
        multiplier *= 128;
      }
      if (!ok) break;
      std::vector<std::uint8_t> body(remaining);
      if (remaining > 0 && !read_exact(fd, body.data(), remaining)) break;

      switch (first & 0xF0) {
        case 0x10:  // CONNECT
          send_all(fd, {0x20, 0x02, 0x00, 0x00});
          break;
        case 0x80: {  // SUBSCRIBE
          if (body.size() < 5) break;
          const std::size_t filter_len = (body[2] << 8) | body[3];
          if (body.size() < 4 + filter_len) break;
          const std::string filter(body.begin() + 4, body.begin() + 4 + filter_len);
          {
            std::lock_guard lock(mutex_);
            client->filters.push_back(filter);
          }
          send_all(fd, {0x90, 0x03, body[0], body[1], 0x00});
          break;
        }
        case 0x30: {  // PUBLISH (QoS 0 assumed)
          if (body.size() < 2) break;
          const std::size_t topic_len = (body[0] << 8) | body[1];
          if (body.size() < 2 + topic_len) break;
          const std::string topic(body.begin() + 2, body.begin() + 2 + topic_len);
          std::vector<std::uint8_t> packet;
          packet.push_back(0x30);
          std::size_t rem = body.size();
          do {
            std::uint8_t b = rem % 128;
            rem /= 128;
            if (rem > 0) b |= 0x80;
            packet.push_back(b);
          } while (rem > 0);
          packet.insert(packet.end(), body.begin(), body.end());

          std::lock_guard lock(mutex_);
          for (const auto& c : clients_) {
            for (const std::string& f : c->filters) {
              if (syncdrive::v2x::topic_matches(f, topic)) {
                send_all(c->fd, packet);
                break;
              }
            }
          }
          break;
        }
        case 0xC0:  // PINGREQ
          send_all(fd, {0xD0, 0x00});
          break;
        case 0xE0:  // DISCONNECT
          return;
        default:
          break;
      }
    }
  }

  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::vector<std::thread> handlers_;
  std::mutex mutex_;
  std::mutex write_mutex_;
  std::vector<std::shared_ptr<Client>> clients_;
};

}  // namespace testsupport
