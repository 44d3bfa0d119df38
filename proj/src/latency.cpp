#include "syncdrive/latency.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace syncdrive::latency {

namespace {

// Nearest-rank percentile on an ascending-sorted vector.
double nearest_rank(const std::vector<double>& sorted, double percentile) {
  const auto n = sorted.size();
  const auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(n)));
  return sorted[std::max<std::size_t>(rank, 1) - 1];
}

}  // namespace

LatencySink::LatencySink(std::size_t capacity) : capacity_(capacity) {}

void LatencySink::record(const LatencySample& sample) {
  if (sample.recv_ms < sample.send_ms) {
    ++clock_anomalies_;
    return;
  }
  if (latencies_ms_.size() >= capacity_) {
    ++overflow_rejected_;
    return;
  }
  latencies_ms_.push_back(sample.recv_ms - sample.send_ms);
}

LatencyStats LatencySink::stats() const {
  if (latencies_ms_.empty()) {
    throw std::logic_error("latency stats on an empty sink");
  }
  std::vector<double> sorted = latencies_ms_;
  std::sort(sorted.begin(), sorted.end());

  double sum = 0.0;
  for (double v : sorted) sum += v;

  LatencyStats s;
  s.count = sorted.size();
  s.mean_ms = sum / static_cast<double>(sorted.size());
  s.min_ms = sorted.front();
  s.max_ms = sorted.back();
  s.p50_ms = nearest_rank(sorted, 50.0);
  s.p95_ms = nearest_rank(sorted, 95.0);
  return s;
}

std::vector<HistogramBin> LatencySink::export_histogram(double bin_width_ms) const {
  if (!(bin_width_ms > 0.0)) {
    throw std::invalid_argument("histogram bin width must be positive");
  }
  if (latencies_ms_.empty()) {
    throw std::logic_error("histogram on an empty sink");
  }
  const auto [min_it, max_it] = std::minmax_element(latencies_ms_.begin(), latencies_ms_.end());
  const double lo = *min_it;
  const auto bins_needed =
      static_cast<std::size_t>(std::floor((*max_it - lo) / bin_width_ms)) + 1;

  std::vector<HistogramBin> bins(bins_needed);
  for (std::size_t i = 0; i < bins.size(); ++i) {
    bins[i].bin_start_ms = lo + static_cast<double>(i) * bin_width_ms;
  }
  for (double v : latencies_ms_) {
    auto idx = static_cast<std::size_t>(std::floor((v - lo) / bin_width_ms));
    idx = std::min(idx, bins.size() - 1);
    bins[idx].count += 1;
  }
  return bins;
}

}  // namespace syncdrive::latency
