#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace syncdrive::latency {

// One end-to-end measurement: embedded send timestamp vs receipt time,
// both on the simulation's single clock (or wall clock for the live probe).
struct LatencySample {
  double send_ms = 0.0;
  double recv_ms = 0.0;
  std::string topic;
};

struct LatencyStats {
  std::size_t count = 0;
  double mean_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
  double p50_ms = 0.0;  // nearest-rank percentiles
  double p95_ms = 0.0;
};

struct HistogramBin {
  double bin_start_ms = 0.0;
  std::size_t count = 0;
};

// Bounded sample collector. A sample with recv < send is a clock anomaly: it
// is counted but not mixed into the statistics. When the capacity cap is
// reached further samples are rejected and counted as overflow.
class LatencySink {
 public:
  explicit LatencySink(std::size_t capacity = kDefaultCapacity);

  void record(const LatencySample& sample);

  // Throws std::logic_error when no samples have been recorded.
  LatencyStats stats() const;

  // Fixed-width bins starting at the sample minimum and covering [min, max];
  // bin counts always sum to size(). Throws std::logic_error on an empty sink
  // and std::invalid_argument on a non-positive width.
  std::vector<HistogramBin> export_histogram(double bin_width_ms) const;

  std::size_t size() const { return latencies_ms_.size(); }
  std::size_t clock_anomaly_count() const { return clock_anomalies_; }
  std::size_t overflow_rejected_count() const { return overflow_rejected_; }
  const std::vector<double>& latencies_ms() const { return latencies_ms_; }

  static constexpr std::size_t kDefaultCapacity = 1 << 20;

 private:
  std::size_t capacity_;
  std::vector<double> latencies_ms_;
  std::size_t clock_anomalies_ = 0;
  std::size_t overflow_rejected_ = 0;
};

}  // namespace syncdrive::latency
