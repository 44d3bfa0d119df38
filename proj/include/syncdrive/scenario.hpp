#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "syncdrive/broker.hpp"
#include "syncdrive/latency.hpp"
#include "syncdrive/mpc.hpp"
#include "syncdrive/supervision.hpp"
#include "syncdrive/vehicle_model.hpp"

namespace syncdrive::sim {

// Complete description of one deterministic run: a profile-driven leader, an
// MPC-driven follower fed only by CAMs received over the simulated network,
// and the supervision automaton gating the follower's actuation.
struct Scenario {
  double duration_s = 120.0;
  double sim_dt_s = 0.02;           // plant integration step
  double controller_period_s = 0.2; // MPC/supervision cadence, multiple of sim_dt_s
  double cam_rate_hz = 10.0;        // leader publish rate
  model::LeadProfile lead_profile;
  model::VehicleState lead_initial{0.0, 8.0, 0.0, 0.0};
  model::VehicleState follower_initial{-10.0, 8.0, 0.0, 0.0};
  mpc::MpcConfig mpc;
  v2x::NetworkModel network;
  supervision::SupervisionConfig supervision;
  // Offset of the follower's clock against the leader's when stamping receipt
  // times. The simulation itself runs on one clock, so with 0 the measured
  // latency is the true latency; a nonzero value reproduces the bias an
  // unsynchronized real-world measurement would carry.
  double clock_skew_ms = 0.0;
  // Master seed; run_scenario feeds it to the network model so one knob
  // controls all stochastic behaviour.
  std::uint64_t seed = 1;

  void validate() const;  // throws std::invalid_argument
};

// Station ids used on the simulated wire.
inline constexpr std::uint32_t kLeaderStationId = 1;
inline constexpr std::uint32_t kFollowerStationId = 2;

struct TraceRow {
  double time_s = 0.0;
  double lead_v = 0.0, lead_a = 0.0, lead_x = 0.0;
  double fol_v = 0.0, fol_a = 0.0, fol_x = 0.0;
  double cmd_a = 0.0;  // gated command in effect during this tick
  supervision::Mode mode = supervision::Mode::Nominal;
  std::optional<double> latency_ms;  // newest sample this tick, if any
};

struct TraceEvent {
  double time_s = 0.0;
  supervision::Mode old_mode = supervision::Mode::Nominal;
  supervision::Mode new_mode = supervision::Mode::Nominal;
  std::string trigger;
};

struct RunTrace {
  std::vector<TraceRow> rows;       // one per sim tick, strictly increasing time
  std::vector<TraceEvent> events;   // supervision transitions
  std::vector<double> latency_samples_ms;  // every sample, in record order
};

struct RunMetrics {
  double rms_speed_error_mps = 0.0;
  double max_speed_error_mps = 0.0;
  double mean_latency_ms = 0.0;  // 0 when no message ever arrived
  std::uint64_t latency_samples = 0;
  std::uint64_t messages_sent = 0;
  // Accepted by the network; the tail may still be in flight at run end.
  std::uint64_t messages_delivered = 0;
  std::uint64_t messages_dropped = 0;
  // Tick counts indexed by supervision::Mode order.
  std::array<std::uint64_t, 4> ticks_in_mode{};
  supervision::Mode final_mode = supervision::Mode::Nominal;
};

struct RunResult {
  RunTrace trace;
  RunMetrics metrics;
  latency::LatencySink latency;  // full sample set for stats/histograms
};

// Runs the fixed-step loop. Identical scenarios (including seed) produce
// byte-identical exported traces. Throws std::invalid_argument on an invalid
// scenario before any stepping.
RunResult run_scenario(const Scenario& sc);

// Derives metrics from a trace alone: speed errors are measured against the
// leader's true contemporaneous speed, latency over all recorded samples.
// Message counters are not derivable from a trace and stay zero; run_scenario
// fills them from the broker. Throws std::logic_error on an empty trace.
RunMetrics compute_metrics(const RunTrace& trace);

// CSV writers with a fixed header:
//   time_s,lead_v,lead_a,lead_x,fol_v,fol_a,fol_x,cmd_a,mode,latency_ms
// (latency_ms empty on ticks without a sample), and for events:
//   time_s,old_mode,new_mode,trigger
void write_trace_csv(const RunTrace& trace, std::ostream& out);
void write_events_csv(const RunTrace& trace, std::ostream& out);

// Writes the trace CSV to `path` and the events CSV next to it, with
// "_events" inserted before the extension (run.csv -> run_events.csv).
// I/O failures surface as std::runtime_error naming the path.
void export_trace(const RunTrace& trace, const std::string& path);

}  // namespace syncdrive::sim
