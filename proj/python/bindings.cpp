#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "syncdrive/broker.hpp"
#include "syncdrive/cam.hpp"
#include "syncdrive/config.hpp"
#include "syncdrive/latency.hpp"
#include "syncdrive/mpc.hpp"
#include "syncdrive/scenario.hpp"
#include "syncdrive/supervision.hpp"
#include "syncdrive/vehicle_model.hpp"

namespace py = pybind11;
using namespace syncdrive;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Synchronized-driving simulator: kinematic plant, MPC, simulated "
            "V2X network, latency measurement and safety supervision";

  // --- model ---
  py::class_<model::VehicleState>(m, "VehicleState")
      .def(py::init<>())
      .def(py::init([](double position_m, double speed_mps, double accel_mps2,
                       double timestamp_s) {
             return model::VehicleState{position_m, speed_mps, accel_mps2, timestamp_s};
           }),
           py::arg("position_m") = 0.0, py::arg("speed_mps") = 0.0,
           py::arg("accel_mps2") = 0.0, py::arg("timestamp_s") = 0.0)
      .def_readwrite("position_m", &model::VehicleState::position_m)
      .def_readwrite("speed_mps", &model::VehicleState::speed_mps)
      .def_readwrite("accel_mps2", &model::VehicleState::accel_mps2)
      .def_readwrite("timestamp_s", &model::VehicleState::timestamp_s)
      .def("__repr__", [](const model::VehicleState& s) {
        return "VehicleState(x=" + std::to_string(s.position_m) +
               ", v=" + std::to_string(s.speed_mps) + ", a=" + std::to_string(s.accel_mps2) +
               ", t=" + std::to_string(s.timestamp_s) + ")";
      });

  py::enum_<model::LeadProfileKind>(m, "LeadProfileKind")
      .value("Constant", model::LeadProfileKind::Constant)
      .value("Sine", model::LeadProfileKind::Sine)
      .value("Piecewise", model::LeadProfileKind::Piecewise);

  py::class_<model::LeadProfile>(m, "LeadProfile")
      .def(py::init<>())
      .def_readwrite("kind", &model::LeadProfile::kind)
      .def_readwrite("amplitude_mps2", &model::LeadProfile::amplitude_mps2)
      .def_readwrite("period_s", &model::LeadProfile::period_s)
      .def_readwrite("offset_mps2", &model::LeadProfile::offset_mps2)
      .def_readwrite("breakpoints", &model::LeadProfile::breakpoints)
      .def("validate", &model::LeadProfile::validate);

  m.def("step_state", &model::step_state, py::arg("state"), py::arg("command_accel_mps2"),
        py::arg("dt_s"), "Integrate one plant step with the standstill clamp");
  m.def("lead_accel", &model::lead_accel, py::arg("profile"), py::arg("t_s"),
        "Lead-profile acceleration at time t");

  // --- mpc ---
  py::class_<mpc::MpcConfig>(m, "MpcConfig")
      .def(py::init<>())
      .def_readwrite("c_v", &mpc::MpcConfig::c_v)
      .def_readwrite("c_a", &mpc::MpcConfig::c_a)
      .def_readwrite("c_u", &mpc::MpcConfig::c_u)
      .def_readwrite("t_s", &mpc::MpcConfig::t_s)
      .def_readwrite("horizon", &mpc::MpcConfig::horizon)
      .def_readwrite("a_min", &mpc::MpcConfig::a_min)
      .def_readwrite("a_max", &mpc::MpcConfig::a_max)
      .def_readwrite("solver_tol", &mpc::MpcConfig::solver_tol)
      .def_readwrite("max_iters", &mpc::MpcConfig::max_iters)
      .def("validate", &mpc::MpcConfig::validate);

  py::class_<mpc::ReferenceState>(m, "ReferenceState")
      .def(py::init<>())
      .def(py::init([](double v_ref_mps, double a_ref_mps2, double source_timestamp_s) {
             return mpc::ReferenceState{v_ref_mps, a_ref_mps2, source_timestamp_s};
           }),
           py::arg("v_ref_mps") = 0.0, py::arg("a_ref_mps2") = 0.0,
           py::arg("source_timestamp_s") = 0.0)
      .def_readwrite("v_ref_mps", &mpc::ReferenceState::v_ref_mps)
      .def_readwrite("a_ref_mps2", &mpc::ReferenceState::a_ref_mps2)
      .def_readwrite("source_timestamp_s", &mpc::ReferenceState::source_timestamp_s);

  py::class_<mpc::ControlSequence>(m, "ControlSequence")
      .def(py::init<>())
      .def(py::init([](std::vector<double> u, int step_index) {
             return mpc::ControlSequence{std::move(u), step_index};
           }),
           py::arg("u"), py::arg("step_index") = 0)
      .def_readwrite("u", &mpc::ControlSequence::u)
      .def_readwrite("step_index", &mpc::ControlSequence::step_index);

  py::class_<mpc::SolveResult>(m, "SolveResult")
      .def_readonly("sequence", &mpc::SolveResult::sequence)
      .def_readonly("converged", &mpc::SolveResult::converged)
      .def_readonly("iterations", &mpc::SolveResult::iterations)
      .def_readonly("cost", &mpc::SolveResult::cost)
      .def_readonly("stationarity", &mpc::SolveResult::stationarity);

  m.def("zero_sequence", &mpc::zero_sequence, py::arg("cfg"));
  m.def("rollout", &mpc::rollout, py::arg("v_ego_mps"), py::arg("ref"), py::arg("seq"),
        py::arg("cfg"), "Predicted speeds v_1..v_H");
  m.def("cost", &mpc::cost, py::arg("seq"), py::arg("prev_seq"), py::arg("v_ego_mps"),
        py::arg("ref"), py::arg("cfg"));
  m.def("cost_gradient", &mpc::cost_gradient, py::arg("seq"), py::arg("prev_seq"),
        py::arg("v_ego_mps"), py::arg("ref"), py::arg("cfg"));
  m.def("solve", &mpc::solve, py::arg("v_ego_mps"), py::arg("ref"), py::arg("prev_seq"),
        py::arg("cfg"), "Box-constrained projected-gradient solve");
  m.def("apply_first", &mpc::apply_first, py::arg("seq"), py::arg("cfg"));

  // --- v2x ---
  py::class_<v2x::CamMessage>(m, "CamMessage")
      .def(py::init<>())
      .def_readwrite("station_id", &v2x::CamMessage::station_id)
      .def_readwrite("generation_time_ms", &v2x::CamMessage::generation_time_ms)
      .def_readwrite("x_m", &v2x::CamMessage::x_m)
      .def_readwrite("y_m", &v2x::CamMessage::y_m)
      .def_readwrite("heading_rad", &v2x::CamMessage::heading_rad)
      .def_readwrite("speed_mps", &v2x::CamMessage::speed_mps)
      .def_readwrite("accel_mps2", &v2x::CamMessage::accel_mps2)
      .def_readwrite("curvature_inv_m", &v2x::CamMessage::curvature_inv_m)
      .def("validate", &v2x::CamMessage::validate)
      .def("__eq__", [](const v2x::CamMessage& a, const v2x::CamMessage& b) { return a == b; });

  m.def("encode_cam", [](const v2x::CamMessage& msg) { return py::bytes(v2x::encode_cam(msg)); },
        py::arg("msg"));
  m.def("decode_cam", [](const std::string& payload) { return v2x::decode_cam(payload); },
        py::arg("payload"));
  m.def("cam_topic", &v2x::cam_topic, py::arg("station_id"));
  m.def("station_from_topic", &v2x::station_from_topic, py::arg("topic"));
  m.def("topic_matches", &v2x::topic_matches, py::arg("pattern"), py::arg("topic"));

  py::class_<v2x::NetworkModel>(m, "NetworkModel")
      .def(py::init<>())
      .def_readwrite("base_latency_ms", &v2x::NetworkModel::base_latency_ms)
      .def_readwrite("jitter_ms", &v2x::NetworkModel::jitter_ms)
      .def_readwrite("loss_prob", &v2x::NetworkModel::loss_prob)
      .def_readwrite("seed", &v2x::NetworkModel::seed)
      .def_readwrite("reorder_allowed", &v2x::NetworkModel::reorder_allowed)
      .def("validate", &v2x::NetworkModel::validate);

  py::class_<v2x::Delivery>(m, "Delivery")
      .def_readonly("topic", &v2x::Delivery::topic)
      .def_property_readonly("payload",
                             [](const v2x::Delivery& d) { return py::bytes(d.payload); })
      .def_readonly("send_time_s", &v2x::Delivery::send_time_s)
      .def_readonly("delivery_time_s", &v2x::Delivery::delivery_time_s);

  py::class_<v2x::SimulatedBroker>(m, "SimulatedBroker")
      .def(py::init<const v2x::NetworkModel&>(), py::arg("network"))
      .def("subscribe", &v2x::SimulatedBroker::subscribe, py::arg("pattern"), py::arg("now_s"))
      .def("publish",
           [](v2x::SimulatedBroker& broker, const std::string& topic, const std::string& payload,
              double send_time_s) { broker.publish(topic, payload, send_time_s); },
           py::arg("topic"), py::arg("payload"), py::arg("send_time_s"))
      .def("poll_deliveries", &v2x::SimulatedBroker::poll_deliveries, py::arg("sub"),
           py::arg("now_s"))
      .def("close", &v2x::SimulatedBroker::close)
      .def_property_readonly("published_count", &v2x::SimulatedBroker::published_count)
      .def_property_readonly("delivered_count", &v2x::SimulatedBroker::delivered_count)
      .def_property_readonly("dropped_count", &v2x::SimulatedBroker::dropped_count);

  // --- latency ---
  py::class_<latency::LatencySample>(m, "LatencySample")
      .def(py::init([](double send_ms, double recv_ms, std::string topic) {
             return latency::LatencySample{send_ms, recv_ms, std::move(topic)};
           }),
           py::arg("send_ms"), py::arg("recv_ms"), py::arg("topic") = "")
      .def_readwrite("send_ms", &latency::LatencySample::send_ms)
      .def_readwrite("recv_ms", &latency::LatencySample::recv_ms)
      .def_readwrite("topic", &latency::LatencySample::topic);

  py::class_<latency::LatencyStats>(m, "LatencyStats")
      .def_readonly("count", &latency::LatencyStats::count)
      .def_readonly("mean_ms", &latency::LatencyStats::mean_ms)
      .def_readonly("min_ms", &latency::LatencyStats::min_ms)
      .def_readonly("max_ms", &latency::LatencyStats::max_ms)
      .def_readonly("p50_ms", &latency::LatencyStats::p50_ms)
      .def_readonly("p95_ms", &latency::LatencyStats::p95_ms);

  py::class_<latency::HistogramBin>(m, "HistogramBin")
      .def_readonly("bin_start_ms", &latency::HistogramBin::bin_start_ms)
      .def_readonly("count", &latency::HistogramBin::count);

  py::class_<latency::LatencySink>(m, "LatencySink")
      .def(py::init<std::size_t>(), py::arg("capacity") = latency::LatencySink::kDefaultCapacity)
      .def("record", &latency::LatencySink::record, py::arg("sample"))
      .def("stats", &latency::LatencySink::stats)
      .def("export_histogram", &latency::LatencySink::export_histogram, py::arg("bin_width_ms"))
      .def("__len__", &latency::LatencySink::size)
      .def_property_readonly("clock_anomaly_count", &latency::LatencySink::clock_anomaly_count)
      .def_property_readonly("overflow_rejected_count",
                             &latency::LatencySink::overflow_rejected_count);

  // --- supervision ---
  py::enum_<supervision::Channel>(m, "Channel")
      .value("Longitudinal", supervision::Channel::Longitudinal)
      .value("Lateral", supervision::Channel::Lateral);

  py::enum_<supervision::Mode>(m, "Mode")
      .value("Nominal", supervision::Mode::Nominal)
      .value("BackupActive", supervision::Mode::BackupActive)
      .value("ActuationDisabled", supervision::Mode::ActuationDisabled)
      .value("ManualOverride", supervision::Mode::ManualOverride);

  py::class_<supervision::SupervisionConfig>(m, "SupervisionConfig")
      .def(py::init<>())
      .def_readwrite("comm_stale_backup_s", &supervision::SupervisionConfig::comm_stale_backup_s)
      .def_readwrite("comm_stale_disable_s",
                     &supervision::SupervisionConfig::comm_stale_disable_s)
      .def_readwrite("control_tick_timeout_s",
                     &supervision::SupervisionConfig::control_tick_timeout_s)
      .def_readwrite("backup_ramp_s", &supervision::SupervisionConfig::backup_ramp_s)
      .def_readwrite("channels_enabled", &supervision::SupervisionConfig::channels_enabled)
      .def("validate", &supervision::SupervisionConfig::validate);

  py::class_<supervision::SupervisionInputs>(m, "SupervisionInputs")
      .def(py::init<>())
      .def_readwrite("now_s", &supervision::SupervisionInputs::now_s)
      .def_readwrite("last_cam_rx_s", &supervision::SupervisionInputs::last_cam_rx_s)
      .def_readwrite("last_control_s", &supervision::SupervisionInputs::last_control_s)
      .def_readwrite("controller_converged",
                     &supervision::SupervisionInputs::controller_converged)
      .def_readwrite("manual_input", &supervision::SupervisionInputs::manual_input);

  py::class_<supervision::SupervisionState>(m, "SupervisionState")
      .def(py::init<>())
      .def(py::init([](supervision::Mode mode, double entered_at_s) {
             return supervision::SupervisionState{mode, entered_at_s};
           }),
           py::arg("mode") = supervision::Mode::Nominal, py::arg("entered_at_s") = 0.0)
      .def_readwrite("mode", &supervision::SupervisionState::mode)
      .def_readwrite("entered_at_s", &supervision::SupervisionState::entered_at_s);

  py::class_<supervision::CommandGate>(m, "CommandGate")
      .def_readonly("mode", &supervision::CommandGate::mode)
      .def_readonly("scale", &supervision::CommandGate::scale)
      .def_readonly("actuation_on", &supervision::CommandGate::actuation_on);

  py::class_<supervision::StepResult>(m, "SupervisionStepResult")
      .def_readonly("state", &supervision::StepResult::state)
      .def_readonly("gate", &supervision::StepResult::gate)
      .def_readonly("trigger", &supervision::StepResult::trigger);

  py::class_<supervision::GatedCommand>(m, "GatedCommand")
      .def_readonly("accel_mps2", &supervision::GatedCommand::accel_mps2)
      .def_readonly("actuation_on", &supervision::GatedCommand::actuation_on);

  m.def("supervision_step", &supervision::step, py::arg("state"), py::arg("inputs"),
        py::arg("cfg"));
  m.def("gate_command", &supervision::gate_command, py::arg("gate"), py::arg("raw_accel_mps2"));
  m.def("mode_name", &supervision::mode_name, py::arg("mode"));

  // --- sim ---
  py::class_<sim::Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("duration_s", &sim::Scenario::duration_s)
      .def_readwrite("sim_dt_s", &sim::Scenario::sim_dt_s)
      .def_readwrite("controller_period_s", &sim::Scenario::controller_period_s)
      .def_readwrite("cam_rate_hz", &sim::Scenario::cam_rate_hz)
      .def_readwrite("lead_profile", &sim::Scenario::lead_profile)
      .def_readwrite("lead_initial", &sim::Scenario::lead_initial)
      .def_readwrite("follower_initial", &sim::Scenario::follower_initial)
      .def_readwrite("mpc", &sim::Scenario::mpc)
      .def_readwrite("network", &sim::Scenario::network)
      .def_readwrite("supervision", &sim::Scenario::supervision)
      .def_readwrite("clock_skew_ms", &sim::Scenario::clock_skew_ms)
      .def_readwrite("seed", &sim::Scenario::seed)
      .def("validate", &sim::Scenario::validate);

  py::class_<sim::TraceRow>(m, "TraceRow")
      .def_readonly("time_s", &sim::TraceRow::time_s)
      .def_readonly("lead_v", &sim::TraceRow::lead_v)
      .def_readonly("lead_a", &sim::TraceRow::lead_a)
      .def_readonly("lead_x", &sim::TraceRow::lead_x)
      .def_readonly("fol_v", &sim::TraceRow::fol_v)
      .def_readonly("fol_a", &sim::TraceRow::fol_a)
      .def_readonly("fol_x", &sim::TraceRow::fol_x)
      .def_readonly("cmd_a", &sim::TraceRow::cmd_a)
      .def_readonly("mode", &sim::TraceRow::mode)
      .def_readonly("latency_ms", &sim::TraceRow::latency_ms);

  py::class_<sim::TraceEvent>(m, "TraceEvent")
      .def_readonly("time_s", &sim::TraceEvent::time_s)
      .def_readonly("old_mode", &sim::TraceEvent::old_mode)
      .def_readonly("new_mode", &sim::TraceEvent::new_mode)
      .def_readonly("trigger", &sim::TraceEvent::trigger);

  py::class_<sim::RunTrace>(m, "RunTrace")
      .def_readonly("rows", &sim::RunTrace::rows)
      .def_readonly("events", &sim::RunTrace::events)
      .def_readonly("latency_samples_ms", &sim::RunTrace::latency_samples_ms);

  py::class_<sim::RunMetrics>(m, "RunMetrics")
      .def_readonly("rms_speed_error_mps", &sim::RunMetrics::rms_speed_error_mps)
      .def_readonly("max_speed_error_mps", &sim::RunMetrics::max_speed_error_mps)
      .def_readonly("mean_latency_ms", &sim::RunMetrics::mean_latency_ms)
      .def_readonly("latency_samples", &sim::RunMetrics::latency_samples)
      .def_readonly("messages_sent", &sim::RunMetrics::messages_sent)
      .def_readonly("messages_delivered", &sim::RunMetrics::messages_delivered)
      .def_readonly("messages_dropped", &sim::RunMetrics::messages_dropped)
      .def_readonly("ticks_in_mode", &sim::RunMetrics::ticks_in_mode)
      .def_readonly("final_mode", &sim::RunMetrics::final_mode);

  py::class_<sim::RunResult>(m, "RunResult")
      .def_readonly("trace", &sim::RunResult::trace)
      .def_readonly("metrics", &sim::RunResult::metrics)
      .def_readonly("latency", &sim::RunResult::latency);

  m.def("run_scenario", &sim::run_scenario, py::arg("scenario"),
        "Run the deterministic fixed-step scenario loop");
  m.def("compute_metrics", &sim::compute_metrics, py::arg("trace"));
  m.def("export_trace", &sim::export_trace, py::arg("trace"), py::arg("path"));

  // --- config ---
  m.def("load_scenario",
        [](const std::string& path) { return cli::load_run_config(path).scenario; },
        py::arg("path"), "Load the scenario from a config file (strict schema)");
}
