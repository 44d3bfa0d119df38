#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "syncdrive/latency.hpp"

namespace syncdrive::cli {

struct ProbeOptions {
  std::string broker_uri;
  std::uint32_t station_id = 1;
  int count = 100;
  double rate_hz = 10.0;
  int settle_timeout_ms = 3000;  // grace period for trailing messages
};

// Publishes `count` CAMs on the canonical topic of `station_id` while
// subscribed to that same topic, and measures publish -> receive latency from
// the embedded generation timestamps. Both ends share this host's clock, so
// this is loop latency through the broker, not inter-vehicle E2E latency.
// Prints per-run stats to `out`; throws std::runtime_error when the broker is
// unreachable or nothing comes back.
latency::LatencyStats run_latency_probe(const ProbeOptions& options, std::ostream& out);

}  // namespace syncdrive::cli
