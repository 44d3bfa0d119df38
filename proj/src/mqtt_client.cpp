#include "syncdrive/mqtt_client.hpp"

#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <stdexcept>

namespace syncdrive::v2x {

namespace {

// MQTT 3.1.1 control packet types (first nibble of the fixed header).
constexpr std::uint8_t kConnect = 0x10;
constexpr std::uint8_t kConnack = 0x20;
constexpr std::uint8_t kPublish = 0x30;
constexpr std::uint8_t kSubscribe = 0x82;  // reserved flags 0b0010 required
constexpr std::uint8_t kSuback = 0x90;
constexpr std::uint8_t kPingresp = 0xD0;
constexpr std::uint8_t kDisconnect = 0xE0;

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void append_string(std::vector<std::uint8_t>& out, std::string_view s) {
  if (s.size() > 0xFFFF) {
    throw std::runtime_error("mqtt string too long");
  }
  append_u16(out, static_cast<std::uint16_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

// Fixed header: type byte plus the variable-length remaining-length field.
std::vector<std::uint8_t> with_fixed_header(std::uint8_t type,
                                            const std::vector<std::uint8_t>& body) {
  std::vector<std::uint8_t> packet;
  packet.push_back(type);
  std::size_t remaining = body.size();
  do {
    std::uint8_t byte = remaining % 128;
    remaining /= 128;
    if (remaining > 0) byte |= 0x80;
    packet.push_back(byte);
  } while (remaining > 0);
  packet.insert(packet.end(), body.begin(), body.end());
  return packet;
}

bool read_exact(int fd, std::uint8_t* buf, std::size_t len) {
  std::size_t got = 0;
  while (got < len) {
    const ssize_t n = ::recv(fd, buf + got, len - got, 0);
    if (n <= 0) return false;
    got += static_cast<std::size_t>(n);
  }
  return true;
}

struct ParsedUri {
  std::string host;
  std::string port;
};

ParsedUri parse_uri(const std::string& uri) {
  std::string rest = uri;
  for (const char* scheme : {"tcp://", "mqtt://"}) {
    if (rest.rfind(scheme, 0) == 0) {
      rest = rest.substr(std::strlen(scheme));
      break;
    }
  }
  const auto colon = rest.find_last_of(':');
  if (colon == std::string::npos) {
    return {rest, "1883"};
  }
  return {rest.substr(0, colon), rest.substr(colon + 1)};
}

}  // namespace

double wall_clock_ms() {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  return std::chrono::duration<double, std::milli>(now).count();
}

MqttClient::~MqttClient() {
  try {
    disconnect();
  } catch (...) {
  }
}

bool MqttClient::connected() const {
  std::lock_guard lock(mutex_);
  return running_;
}

void MqttClient::send_packet(const std::vector<std::uint8_t>& packet) {
  std::lock_guard lock(mutex_);
  if (fd_ < 0) {
    throw std::runtime_error("mqtt client is not connected");
  }
  std::size_t sent = 0;
  while (sent < packet.size()) {
    const ssize_t n = ::send(fd_, packet.data() + sent, packet.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) {
      throw std::runtime_error("mqtt send failed");
    }
    sent += static_cast<std::size_t>(n);
  }
}

void MqttClient::connect(const std::string& uri, const std::string& client_id, int timeout_ms) {
  if (fd_ >= 0) {
    throw std::runtime_error("mqtt client is already connected");
  }
  const ParsedUri parsed = parse_uri(uri);

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(parsed.host.c_str(), parsed.port.c_str(), &hints, &res) != 0 || !res) {
    throw std::runtime_error("cannot resolve broker: " + uri);
  }

  int fd = -1;
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) {
    throw std::runtime_error("cannot connect to broker: " + uri);
  }

  timeval tv{};
  tv.tv_sec = timeout_ms / 1000;
  tv.tv_usec = (timeout_ms % 1000) * 1000;
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);

  // CONNECT: protocol "MQTT" level 4, clean session, keepalive disabled.
  std::vector<std::uint8_t> body;
  append_string(body, "MQTT");
  body.push_back(0x04);
  body.push_back(0x02);
  append_u16(body, 0);
  append_string(body, client_id);
  const auto connect_packet = with_fixed_header(kConnect, body);
  {
    std::size_t sent = 0;
    while (sent < connect_packet.size()) {
      const ssize_t n =
          ::send(fd, connect_packet.data() + sent, connect_packet.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) {
        ::close(fd);
        throw std::runtime_error("mqtt CONNECT send failed");
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::uint8_t connack[4];
  if (!read_exact(fd, connack, 4) || connack[0] != kConnack || connack[1] != 2) {
    ::close(fd);
    throw std::runtime_error("mqtt CONNACK not received from " + uri);
  }
  if (connack[3] != 0) {
    ::close(fd);
    throw std::runtime_error("mqtt connection refused, code " + std::to_string(connack[3]));
  }

  // Handshake reads are done; the reader thread takes over with no timeout.
  tv.tv_sec = 0;
  tv.tv_usec = 0;
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);

  {
    std::lock_guard lock(mutex_);
    fd_ = fd;
    running_ = true;
  }
  reader_ = std::thread([this] { reader_loop(); });
}

void MqttClient::reader_loop() {
  for (;;) {
    std::uint8_t first = 0;
    if (!read_exact(fd_, &first, 1)) break;

    std::size_t remaining = 0;
    std::size_t multiplier = 1;
    bool length_ok = false;
    for (int i = 0; i < 4; ++i) {
      std::uint8_t byte = 0;
      if (!read_exact(fd_, &byte, 1)) {
        multiplier = 0;
        break;
      }
      remaining += static_cast<std::size_t>(byte & 0x7F) * multiplier;
      if ((byte & 0x80) == 0) {
        length_ok = true;
        break;
      }
      multiplier *= 128;
    }
    if (!length_ok) break;

    std::vector<std::uint8_t> payload(remaining);
    if (remaining > 0 && !read_exact(fd_, payload.data(), remaining)) break;

    const std::uint8_t type = first & 0xF0;
    if (type == kPublish) {
      if (payload.size() < 2) continue;
      const std::size_t topic_len =
          (static_cast<std::size_t>(payload[0]) << 8) | payload[1];
      if (payload.size() < 2 + topic_len) continue;
      MqttMessage msg;
      msg.topic.assign(payload.begin() + 2, payload.begin() + 2 + topic_len);
      std::size_t offset = 2 + topic_len;
      const std::uint8_t qos = (first >> 1) & 0x03;
      if (qos > 0) offset += 2;  // skip the packet id of QoS > 0 publishes
      if (offset > payload.size()) continue;
      msg.payload.assign(payload.begin() + offset, payload.end());
      msg.recv_wall_ms = wall_clock_ms();
      {
        std::lock_guard lock(mutex_);
        inbox_.push_back(std::move(msg));
      }
      cv_.notify_all();
    } else if (type == (kSuback & 0xF0)) {
      if (payload.size() >= 2) {
        const std::uint16_t packet_id =
            static_cast<std::uint16_t>((payload[0] << 8) | payload[1]);
        std::lock_guard lock(mutex_);
        if (packet_id == awaited_suback_) {
          suback_received_ = true;
        }
      }
      cv_.notify_all();
    } else if (first == kPingresp) {
      // ignored
    }
  }
  {
    std::lock_guard lock(mutex_);
    running_ = false;
  }
  cv_.notify_all();
}

void MqttClient::subscribe(const std::string& topic_filter, int timeout_ms) {
  std::uint16_t packet_id = 0;
  {
    std::lock_guard lock(mutex_);
    packet_id = next_packet_id_++;
    if (next_packet_id_ == 0) next_packet_id_ = 1;
    awaited_suback_ = packet_id;
    suback_received_ = false;
  }
  std::vector<std::uint8_t> body;
  append_u16(body, packet_id);
  append_string(body, topic_filter);
  body.push_back(0x00);  // requested QoS 0
  send_packet(with_fixed_header(kSubscribe, body));

  std::unique_lock lock(mutex_);
  if (!cv_.wait_for(lock, std::chrono::milliseconds(timeout_ms),
                    [this] { return suback_received_ || !running_; }) ||
      !suback_received_) {
    throw std::runtime_error("mqtt SUBACK not received for " + topic_filter);
  }
}

void MqttClient::publish(const std::string& topic, std::string_view payload) {
  std::vector<std::uint8_t> body;
  append_string(body, topic);
  body.insert(body.end(), payload.begin(), payload.end());
  send_packet(with_fixed_header(kPublish, body));
}

std::vector<MqttMessage> MqttClient::drain() {
  std::lock_guard lock(mutex_);
  std::vector<MqttMessage> out;
  out.swap(inbox_);
  return out;
}

void MqttClient::disconnect() {
  int fd = -1;
  {
    std::lock_guard lock(mutex_);
    if (fd_ < 0) return;
    fd = fd_;
  }
  try {
    send_packet(with_fixed_header(kDisconnect, {}));
  } catch (...) {
  }
  ::shutdown(fd, SHUT_RDWR);
  if (reader_.joinable()) reader_.join();
  {
    std::lock_guard lock(mutex_);
    ::close(fd_);
    fd_ = -1;
    running_ = false;
  }
}

}  // namespace syncdrive::v2x
