#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace syncdrive::v2x {

// Stochastic model of the pub/sub path between vehicles and the broker.
//
// One-way delay for a message is
//   delay_ms = max(0, base_latency_ms + jitter_ms * exp(Z - 1/2)),  Z ~ N(0,1)
// i.e. a shifted lognormal whose jitter term has mean exactly jitter_ms, so
// the mean one-way latency is base_latency_ms + jitter_ms. Losses are
// independent per message with probability loss_prob. All sampling comes from
// one generator seeded with `seed`, consumed in publish order (loss draw
// first, then jitter), so a schedule of publishes is fully reproducible.
struct NetworkModel {
  double base_latency_ms = 0.0;
  double jitter_ms = 0.0;
  double loss_prob = 0.0;  // [0, 1]
  std::uint64_t seed = 1;
  bool reorder_allowed = true;

  void validate() const;  // throws std::invalid_argument
};

// Deterministic sampling helper. Draws map fixed numbers of mt19937_64 words
// so sequences are identical across platforms.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; always consumes two uniforms.
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(6.283185307179586 * u2);
  }

 private:
  std::mt19937_64 gen_;
};

struct Delivery {
  std::string topic;
  std::string payload;
  double send_time_s = 0.0;
  double delivery_time_s = 0.0;
};

// Single-threaded simulated pub/sub broker driven by the simulation clock.
// Messages published to a topic are delivered to every matching subscription
// once their sampled delivery time has passed, in delivery-time order with
// publish order breaking ties. With reorder_allowed=false the broker delays
// younger messages so per-topic delivery order equals publish order.
// Delivery is at-most-once: a lost message is counted and never seen again.
class SimulatedBroker {
 public:
  explicit SimulatedBroker(const NetworkModel& net);

  using SubscriptionId = std::size_t;

  // Registers a topic filter (exact or single-level '+' wildcard). The
  // subscription only sees messages published after it was created.
  SubscriptionId subscribe(const std::string& pattern, double now_s);

  // Enqueues a payload; samples loss and delay. Throws std::logic_error when
  // the broker is closed.
  void publish(const std::string& topic, std::string payload, double send_time_s);

  // All deliveries for `sub` due at or before now_s, in delivery order.
  // Polling is destructive: a delivered message is not returned again.
  std::vector<Delivery> poll_deliveries(SubscriptionId sub, double now_s);

  void close() { open_ = false; }
  bool is_open() const { return open_; }

  std::uint64_t published_count() const { return published_; }
  // Messages that passed the loss gate (delivered or still in flight).
  std::uint64_t delivered_count() const { return delivered_; }
  std::uint64_t dropped_count() const { return dropped_; }

  struct TopicCounters {
    std::uint64_t published = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
  };
  // Per-topic accounting; zeros for topics never published to.
  TopicCounters topic_counters(const std::string& topic) const;

 private:
  struct StoredMessage {
    std::string topic;
    std::string payload;
    double send_time_s;
    double delivery_time_s;
    std::uint64_t publish_index;
  };
  struct QueueEntry {
    double delivery_time_s;
    std::uint64_t publish_index;
    std::size_t message_slot;
    bool operator>(const QueueEntry& other) const {
      return std::tie(delivery_time_s, publish_index) >
             std::tie(other.delivery_time_s, other.publish_index);
    }
  };
  struct Subscription {
    std::string pattern;
    double subscribed_at_s;
    // Due messages, ordered by (delivery_time, publish order).
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> pending;
  };

  NetworkModel net_;
  SeededRng rng_;
  bool open_ = true;
  std::uint64_t published_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_ = 0;
  std::vector<StoredMessage> messages_;  // surviving messages, publish order
  std::vector<Subscription> subs_;
  std::unordered_map<std::string, TopicCounters> per_topic_;
  // Last effective delivery time per topic, enforcing FIFO when reordering
  // is disallowed.
  std::unordered_map<std::string, double> topic_fifo_floor_;
};

}  // namespace syncdrive::v2x
