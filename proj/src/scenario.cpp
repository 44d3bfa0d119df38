#include "syncdrive/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "syncdrive/cam.hpp"

namespace syncdrive::sim {

namespace {

constexpr double kTimeEps = 1e-9;

void check_initial_state(const model::VehicleState& s, const char* which) {
  if (!std::isfinite(s.position_m) || !std::isfinite(s.speed_mps) ||
      !std::isfinite(s.accel_mps2)) {
    throw std::invalid_argument(std::string(which) + " initial state must be finite");
  }
  if (s.speed_mps < 0.0) {
    throw std::invalid_argument(std::string(which) + " initial speed must be >= 0");
  }
}

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

v2x::CamMessage cam_from_state(const model::VehicleState& s, std::uint32_t station_id) {
  v2x::CamMessage msg;
  msg.station_id = station_id;
  msg.generation_time_ms = static_cast<std::uint64_t>(std::llround(s.timestamp_s * 1000.0));
  msg.x_m = s.position_m;
  msg.y_m = 0.0;
  msg.heading_rad = 0.0;
  msg.speed_mps = s.speed_mps;
  msg.accel_mps2 = s.accel_mps2;
  msg.curvature_inv_m = 0.0;
  return msg;
}

}  // namespace

void Scenario::validate() const {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw std::invalid_argument("scenario requires duration_s > 0");
  }
  if (!(sim_dt_s > 0.0) || !std::isfinite(sim_dt_s)) {
    throw std::invalid_argument("scenario requires sim_dt_s > 0");
  }
  if (sim_dt_s > controller_period_s + kTimeEps) {
    throw std::invalid_argument("scenario requires sim_dt_s <= controller_period_s");
  }
  const double ratio = controller_period_s / sim_dt_s;
  if (std::abs(ratio - std::round(ratio)) > 1e-6) {
    throw std::invalid_argument(
        "scenario requires controller_period_s to be an integer multiple of sim_dt_s");
  }
  if (!(cam_rate_hz > 0.0) || !std::isfinite(cam_rate_hz)) {
    throw std::invalid_argument("scenario requires cam_rate_hz > 0");
  }
  if (!std::isfinite(clock_skew_ms)) {
    throw std::invalid_argument("scenario requires finite clock_skew_ms");
  }
  lead_profile.validate();
  check_initial_state(lead_initial, "lead");
  check_initial_state(follower_initial, "follower");
  mpc.validate();
  network.validate();
  supervision.validate();
}

RunResult run_scenario(const Scenario& sc) {
  sc.validate();

  const double dt = sc.sim_dt_s;
  const auto n_ticks = static_cast<std::int64_t>(std::llround(sc.duration_s / dt));
  const auto ctrl_every = static_cast<std::int64_t>(std::llround(sc.controller_period_s / dt));
  const double cam_period_s = 1.0 / sc.cam_rate_hz;

  v2x::NetworkModel net = sc.network;
  net.seed = sc.seed;
  v2x::SimulatedBroker broker(net);
  const auto sub = broker.subscribe(v2x::cam_topic(kLeaderStationId), 0.0);

  RunResult result;
  result.trace.rows.reserve(static_cast<std::size_t>(n_ticks));

  model::VehicleState lead = sc.lead_initial;
  model::VehicleState follower = sc.follower_initial;
  lead.timestamp_s = 0.0;
  follower.timestamp_s = 0.0;

  // Until the first CAM arrives the follower holds its own state as the
  // reference: zero error, zero action. Staleness is supervision's concern.
  mpc::ReferenceState ref{follower.speed_mps, 0.0, 0.0};
  mpc::ControlSequence prev_seq = mpc::zero_sequence(sc.mpc);
  bool controller_converged = true;
  double last_cam_rx_s = 0.0;
  double last_control_s = 0.0;
  double held_cmd = 0.0;

  supervision::SupervisionState sup_state{supervision::Mode::Nominal, 0.0};

  double next_cam_t = 0.0;
  std::uint64_t newest_gen_ms = 0;
  bool have_cam = false;

  for (std::int64_t n = 0; n < n_ticks; ++n) {
    const double t = static_cast<double>(n) * dt;

    // Leader publishes its current state at CAM instants.
    while (t >= next_cam_t - kTimeEps) {
      broker.publish(v2x::cam_topic(kLeaderStationId), v2x::encode_cam(cam_from_state(lead, kLeaderStationId)),
                     t);
      next_cam_t += cam_period_s;
    }

    // Drain the network; adopt the newest CAM by generation time.
    std::optional<double> tick_latency_ms;
    for (const v2x::Delivery& d : broker.poll_deliveries(sub, t)) {
      const v2x::CamMessage msg = v2x::decode_cam(d.payload);
      const double recv_ms = d.delivery_time_s * 1000.0 + sc.clock_skew_ms;
      const double send_ms = static_cast<double>(msg.generation_time_ms);
      const std::size_t before = result.latency.size();
      result.latency.record(latency::LatencySample{send_ms, recv_ms, d.topic});
      if (result.latency.size() > before) {
        result.trace.latency_samples_ms.push_back(recv_ms - send_ms);
        tick_latency_ms = recv_ms - send_ms;
      }
      if (!have_cam || msg.generation_time_ms > newest_gen_ms) {
        have_cam = true;
        newest_gen_ms = msg.generation_time_ms;
        ref = mpc::ReferenceState{msg.speed_mps, msg.accel_mps2,
                                  static_cast<double>(msg.generation_time_ms) * 1e-3};
        last_cam_rx_s = d.delivery_time_s;
      }
    }

    // Controller cadence: supervision first, then the MPC solve, then gating.
    if (n % ctrl_every == 0) {
      supervision::SupervisionInputs inputs;
      inputs.now_s = t;
      inputs.last_cam_rx_s = last_cam_rx_s;
      inputs.last_control_s = last_control_s;
      inputs.controller_converged = controller_converged;
      const supervision::StepResult stepped = supervision::step(sup_state, inputs, sc.supervision);
      if (!stepped.trigger.empty()) {
        result.trace.events.push_back(
            TraceEvent{t, sup_state.mode, stepped.state.mode, stepped.trigger});
      }
      sup_state = stepped.state;

      const mpc::SolveResult solved = mpc::solve(follower.speed_mps, ref, prev_seq, sc.mpc);
      controller_converged = solved.converged;
      const double raw_cmd = mpc::apply_first(solved.sequence, sc.mpc);
      prev_seq = solved.sequence;
      last_control_s = t;

      held_cmd = supervision::gate_command(stepped.gate, raw_cmd).accel_mps2;
    }

    result.trace.rows.push_back(TraceRow{t, lead.speed_mps, lead.accel_mps2, lead.position_m,
                                         follower.speed_mps, follower.accel_mps2,
                                         follower.position_m, held_cmd, sup_state.mode,
                                         tick_latency_ms});

    // Integrate both plants to the next tick.
    lead = model::step_state(lead, model::lead_accel(sc.lead_profile, t), dt);
    follower = model::step_state(follower, held_cmd, dt);
  }

  result.metrics = compute_metrics(result.trace);
  result.metrics.messages_sent = broker.published_count();
  result.metrics.messages_delivered = broker.delivered_count();
  result.metrics.messages_dropped = broker.dropped_count();
  return result;
}

RunMetrics compute_metrics(const RunTrace& trace) {
  if (trace.rows.empty()) {
    throw std::logic_error("compute_metrics on an empty trace");
  }
  RunMetrics m;
  double sum_sq = 0.0;
  for (const TraceRow& row : trace.rows) {
    const double err = row.fol_v - row.lead_v;
    sum_sq += err * err;
    m.max_speed_error_mps = std::max(m.max_speed_error_mps, std::abs(err));
    m.ticks_in_mode[static_cast<std::size_t>(row.mode)] += 1;
  }
  m.rms_speed_error_mps = std::sqrt(sum_sq / static_cast<double>(trace.rows.size()));
  m.final_mode = trace.rows.back().mode;

  m.latency_samples = trace.latency_samples_ms.size();
  if (!trace.latency_samples_ms.empty()) {
    double sum = 0.0;
    for (double v : trace.latency_samples_ms) sum += v;
    m.mean_latency_ms = sum / static_cast<double>(trace.latency_samples_ms.size());
  }
  return m;
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  out << "time_s,lead_v,lead_a,lead_x,fol_v,fol_a,fol_x,cmd_a,mode,latency_ms\n";
  for (const TraceRow& r : trace.rows) {
    out << csv_double(r.time_s) << ',' << csv_double(r.lead_v) << ',' << csv_double(r.lead_a)
        << ',' << csv_double(r.lead_x) << ',' << csv_double(r.fol_v) << ','
        << csv_double(r.fol_a) << ',' << csv_double(r.fol_x) << ',' << csv_double(r.cmd_a)
        << ',' << supervision::mode_name(r.mode) << ',';
    if (r.latency_ms) out << csv_double(*r.latency_ms);
    out << '\n';
  }
}

void write_events_csv(const RunTrace& trace, std::ostream& out) {
  out << "time_s,old_mode,new_mode,trigger\n";
  for (const TraceEvent& e : trace.events) {
    out << csv_double(e.time_s) << ',' << supervision::mode_name(e.old_mode) << ','
        << supervision::mode_name(e.new_mode) << ',' << e.trigger << '\n';
  }
}

namespace {

std::string events_path_for(const std::string& trace_path) {
  const auto slash = trace_path.find_last_of('/');
  const auto dot = trace_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return trace_path + "_events";
  }
  return trace_path.substr(0, dot) + "_events" + trace_path.substr(dot);
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  writer(out);
  out.flush();
  if (!out.good()) {
    throw std::runtime_error("write failed: " + path);
  }
}

}  // namespace

void export_trace(const RunTrace& trace, const std::string& path) {
  write_file(path, [&](std::ostream& out) { write_trace_csv(trace, out); });
  write_file(events_path_for(path), [&](std::ostream& out) { write_events_csv(trace, out); });
}

}  // namespace syncdrive::sim
