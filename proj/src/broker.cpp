#include "syncdrive/broker.hpp"

#include <algorithm>
#include <stdexcept>

#include "syncdrive/cam.hpp"

namespace syncdrive::v2x {

void NetworkModel::validate() const {
  if (!(base_latency_ms >= 0.0) || !std::isfinite(base_latency_ms)) {
    throw std::invalid_argument("network requires base_latency_ms >= 0");
  }
  if (!(jitter_ms >= 0.0) || !std::isfinite(jitter_ms)) {
    throw std::invalid_argument("network requires jitter_ms >= 0");
  }
  if (!(loss_prob >= 0.0 && loss_prob <= 1.0)) {
    throw std::invalid_argument("network requires loss_prob in [0, 1]");
  }
}

SimulatedBroker::SimulatedBroker(const NetworkModel& net) : net_(net), rng_(net.seed) {
  net_.validate();
}

SimulatedBroker::SubscriptionId SimulatedBroker::subscribe(const std::string& pattern,
                                                           double now_s) {
  topic_matches(pattern, "");  // validates the pattern, result irrelevant
  subs_.push_back(Subscription{pattern, now_s, {}});
  return subs_.size() - 1;
}

void SimulatedBroker::publish(const std::string& topic, std::string payload,
                              double send_time_s) {
  if (!open_) {
    throw std::logic_error("publish on a closed broker");
  }
  const std::uint64_t index = published_++;
  TopicCounters& counters = per_topic_[topic];
  ++counters.published;

  // Fixed draw order per publish keeps the schedule reproducible.
  const double loss_draw = rng_.uniform01();
  const double jitter_draw = rng_.normal();
  if (loss_draw < net_.loss_prob) {
    ++dropped_;
    ++counters.dropped;
    return;
  }
  ++delivered_;
  ++counters.delivered;

  const double jitter_term =
      net_.jitter_ms > 0.0 ? net_.jitter_ms * std::exp(jitter_draw - 0.5) : 0.0;
  const double delay_ms = std::max(0.0, net_.base_latency_ms + jitter_term);
  double delivery_time_s = send_time_s + delay_ms * 1e-3;

  if (!net_.reorder_allowed) {
    auto [it, inserted] = topic_fifo_floor_.try_emplace(topic, delivery_time_s);
    if (!inserted) {
      delivery_time_s = std::max(delivery_time_s, it->second);
      it->second = delivery_time_s;
    }
  }

  const std::size_t slot = messages_.size();
  messages_.push_back(StoredMessage{topic, std::move(payload), send_time_s, delivery_time_s,
                                    index});
  for (auto& sub : subs_) {
    if (topic_matches(sub.pattern, topic)) {
      sub.pending.push(QueueEntry{delivery_time_s, index, slot});
    }
  }
}

SimulatedBroker::TopicCounters SimulatedBroker::topic_counters(const std::string& topic) const {
  const auto it = per_topic_.find(topic);
  return it == per_topic_.end() ? TopicCounters{} : it->second;
}

std::vector<Delivery> SimulatedBroker::poll_deliveries(SubscriptionId sub, double now_s) {
  if (sub >= subs_.size()) {
    throw std::invalid_argument("unknown subscription handle");
  }
  std::vector<Delivery> due;
  auto& pending = subs_[sub].pending;
  while (!pending.empty() && pending.top().delivery_time_s <= now_s) {
    const StoredMessage& msg = messages_[pending.top().message_slot];
    due.push_back(Delivery{msg.topic, msg.payload, msg.send_time_s, msg.delivery_time_s});
    pending.pop();
  }
  return due;
}

}  // namespace syncdrive::v2x
