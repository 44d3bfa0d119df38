#include "syncdrive/latency.hpp"

#include <algorithm>
#include <random>

#include <stdexcept>

#include "doctest.h"
#include "syncdrive/broker.hpp"

using namespace syncdrive::latency;

namespace {

LatencySink sink_of(const std::vector<double>& latencies_ms) {
  LatencySink sink;
  for (double v : latencies_ms) {
    sink.record(LatencySample{1000.0, 1000.0 + v, "vehicles/1/cam"});
  }
  return sink;
}

}  // namespace

TEST_CASE("latency stats: constant samples") {
  const LatencyStats s = sink_of({50.0, 50.0, 50.0}).stats();
  CHECK(s.count == 3);
  CHECK(s.mean_ms == doctest::Approx(50.0));
  CHECK(s.min_ms == doctest::Approx(50.0));
  CHECK(s.max_ms == doctest::Approx(50.0));
}

TEST_CASE("latency stats: symmetric samples") {
  const LatencyStats s = sink_of({40.0, 50.0, 60.0}).stats();
  CHECK(s.mean_ms == doctest::Approx(50.0));
  CHECK(s.p50_ms == doctest::Approx(50.0));
  CHECK(s.min_ms == doctest::Approx(40.0));
  CHECK(s.max_ms == doctest::Approx(60.0));
}

TEST_CASE("latency stats: nearest-rank percentiles on 1..100") {
  std::vector<double> values(100);
  for (int i = 0; i < 100; ++i) values[i] = i + 1.0;
  std::mt19937 rng(3);
  std::shuffle(values.begin(), values.end(), rng);
  const LatencyStats s = sink_of(values).stats();
  CHECK(s.p50_ms == doctest::Approx(50.0));
  CHECK(s.p95_ms == doctest::Approx(95.0));
  CHECK(s.min_ms == doctest::Approx(1.0));
  CHECK(s.max_ms == doctest::Approx(100.0));
  CHECK(s.min_ms <= s.p50_ms);
  CHECK(s.p50_ms <= s.p95_ms);
  CHECK(s.p95_ms <= s.max_ms);
}

TEST_CASE("latency stats: order independence") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> lat(1.0, 200.0);
  std::vector<double> values(257);
  for (double& v : values) v = lat(rng);

  const LatencyStats a = sink_of(values).stats();
  std::shuffle(values.begin(), values.end(), rng);
  const LatencyStats b = sink_of(values).stats();
  CHECK(a.mean_ms == doctest::Approx(b.mean_ms).epsilon(1e-12));
  CHECK(a.min_ms == b.min_ms);
  CHECK(a.max_ms == b.max_ms);
  CHECK(a.p50_ms == b.p50_ms);
  CHECK(a.p95_ms == b.p95_ms);
}

TEST_CASE("latency stats: empty sink is an error") {
  LatencySink sink;
  CHECK_THROWS_AS(sink.stats(), std::logic_error);
  CHECK_THROWS_AS(sink.export_histogram(1.0), std::logic_error);
}

TEST_CASE("latency sink: clock anomalies counted, not mixed in") {
  LatencySink sink;
  sink.record(LatencySample{100.0, 150.0, "t"});
  sink.record(LatencySample{200.0, 150.0, "t"});  // recv < send
  CHECK(sink.size() == 1);
  CHECK(sink.clock_anomaly_count() == 1);
  CHECK(sink.stats().mean_ms == doctest::Approx(50.0));
}

TEST_CASE("latency sink: capacity cap rejects and counts overflow") {
  LatencySink sink(3);
  for (int i = 0; i < 5; ++i) {
    sink.record(LatencySample{0.0, 10.0 + i, "t"});
  }
  CHECK(sink.size() == 3);
  CHECK(sink.overflow_rejected_count() == 2);
  CHECK(sink.stats().max_ms == doctest::Approx(12.0));
}

TEST_CASE("latency histogram: counts sum to the sample count for any width") {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> lat(5.0, 300.0);
  std::vector<double> values(1234);
  for (double& v : values) v = lat(rng);
  const LatencySink sink = sink_of(values);

  for (double width : {0.5, 1.0, 7.3, 50.0, 1000.0}) {
    const auto bins = sink.export_histogram(width);
    std::size_t total = 0;
    for (const auto& bin : bins) total += bin.count;
    CHECK(total == sink.size());
    // Bins start at the minimum and cover the maximum.
    const LatencyStats s = sink.stats();
    CHECK(bins.front().bin_start_ms == doctest::Approx(s.min_ms));
    CHECK(bins.back().bin_start_ms <= s.max_ms);
    CHECK(bins.back().bin_start_ms + width >= s.max_ms);
  }
  CHECK_THROWS_AS(sink.export_histogram(0.0), std::invalid_argument);
}

TEST_CASE("latency via the simulated broker: constant base recovers exactly") {
  // Single simulation clock: measured latency is true latency up to double
  // rounding (~1e-13 ms here).
  syncdrive::v2x::NetworkModel net;
  net.base_latency_ms = 49.73;
  net.seed = 1;
  syncdrive::v2x::SimulatedBroker broker(net);
  const auto sub = broker.subscribe("vehicles/1/cam", 0.0);

  LatencySink sink;
  for (int i = 0; i < 1000; ++i) {
    const double send_s = 0.1 * i;
    broker.publish("vehicles/1/cam", "m", send_s);
  }
  for (const auto& d : broker.poll_deliveries(sub, 1e9)) {
    sink.record(LatencySample{d.send_time_s * 1000.0, d.delivery_time_s * 1000.0, d.topic});
  }
  REQUIRE(sink.size() == 1000);
  const LatencyStats s = sink.stats();
  CHECK(std::abs(s.mean_ms - 49.73) <= 1e-9);
  CHECK(std::abs(s.min_ms - 49.73) <= 1e-9);
  CHECK(std::abs(s.max_ms - 49.73) <= 1e-9);
}
