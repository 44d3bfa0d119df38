#pragma once

#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace syncdrive::v2x {

struct MqttMessage {
  std::string topic;
  std::string payload;
  double recv_wall_ms = 0.0;  // receiver wall clock when the packet arrived
};

// Wall clock in milliseconds since the Unix epoch.
double wall_clock_ms();

// Minimal MQTT 3.1.1 client for the real-broker transport: QoS 0 only, clean
// session, no retained messages. It satisfies the same publish/subscribe
// contract as the simulated broker and uses the same topic scheme and CAM
// payload format. A background thread reads incoming PUBLISH packets into an
// ordered queue that the consumer drains at its own pace.
class MqttClient {
 public:
  MqttClient() = default;
  ~MqttClient();
  MqttClient(const MqttClient&) = delete;
  MqttClient& operator=(const MqttClient&) = delete;

  // uri: [tcp://]host[:port], port defaults to 1883. Throws std::runtime_error
  // when the TCP connect or MQTT handshake fails.
  void connect(const std::string& uri, const std::string& client_id,
               int timeout_ms = 5000);

  // QoS 0 subscription; waits for the SUBACK.
  void subscribe(const std::string& topic_filter, int timeout_ms = 5000);

  // Fire-and-forget QoS 0 publish.
  void publish(const std::string& topic, std::string_view payload);

  // Removes and returns everything received so far, in arrival order.
  std::vector<MqttMessage> drain();

  bool connected() const;
  void disconnect();

 private:
  void reader_loop();
  void send_packet(const std::vector<std::uint8_t>& packet);

  int fd_ = -1;
  std::thread reader_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<MqttMessage> inbox_;
  std::uint16_t next_packet_id_ = 1;
  std::uint16_t awaited_suback_ = 0;
  bool suback_received_ = false;
  bool running_ = false;
};

}  // namespace syncdrive::v2x
