#include "syncdrive/probe.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "syncdrive/cam.hpp"
#include "syncdrive/mqtt_client.hpp"

namespace syncdrive::cli {

namespace {

void collect(v2x::MqttClient& client, latency::LatencySink& sink, int& received) {
  for (const v2x::MqttMessage& m : client.drain()) {
    v2x::CamMessage cam;
    try {
      cam = v2x::decode_cam(m.payload);
    } catch (const v2x::CamDecodeError&) {
      continue;  // foreign traffic on the topic
    }
    sink.record(latency::LatencySample{static_cast<double>(cam.generation_time_ms),
                                       m.recv_wall_ms, m.topic});
    ++received;
  }
}

}  // namespace

latency::LatencyStats run_latency_probe(const ProbeOptions& options, std::ostream& out) {
  if (options.count < 1 || !(options.rate_hz > 0.0)) {
    throw std::invalid_argument("latency probe requires count >= 1 and rate_hz > 0");
  }

  v2x::MqttClient client;
  client.connect(options.broker_uri, "syncdrive-probe-" + std::to_string(options.station_id));
  const std::string topic = v2x::cam_topic(options.station_id);
  client.subscribe(topic);

  latency::LatencySink sink;
  int received = 0;
  const auto period = std::chrono::duration<double>(1.0 / options.rate_hz);

  for (int i = 0; i < options.count; ++i) {
    v2x::CamMessage cam;
    cam.station_id = options.station_id;
    // Truncate: the stamped millisecond must never be ahead of the receive
    // clock, or sub-millisecond loop latencies read as clock anomalies.
    cam.generation_time_ms = static_cast<std::uint64_t>(v2x::wall_clock_ms());
    client.publish(topic, v2x::encode_cam(cam));
    std::this_thread::sleep_for(period);
    collect(client, sink, received);
  }

  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::milliseconds(options.settle_timeout_ms);
  while (received < options.count && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
    collect(client, sink, received);
  }
  client.disconnect();

  out << "published " << options.count << " cam messages on " << topic << ", received "
      << received << "\n";
  if (sink.size() == 0) {
    throw std::runtime_error("latency probe received no messages back from " +
                             options.broker_uri);
  }
  const latency::LatencyStats stats = sink.stats();
  out << "loop latency over " << stats.count << " samples (same-host clock): mean "
      << stats.mean_ms << " ms, min " << stats.min_ms << " ms, p50 " << stats.p50_ms
      << " ms, p95 " << stats.p95_ms << " ms, max " << stats.max_ms << " ms\n";
  return stats;
}

}  // namespace syncdrive::cli
