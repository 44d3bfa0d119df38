#include "syncdrive/supervision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace syncdrive::supervision {

namespace {

bool manual_on_enabled_channel(const SupervisionInputs& in, const SupervisionConfig& cfg) {
  return std::any_of(in.manual_input.begin(), in.manual_input.end(),
                     [&](Channel c) { return cfg.channels_enabled.count(c) > 0; });
}

CommandGate gate_for(const SupervisionState& state, double now_s, const SupervisionConfig& cfg) {
  switch (state.mode) {
    case Mode::Nominal:
      return CommandGate{Mode::Nominal, 1.0, true};
    case Mode::BackupActive: {
      const double elapsed = now_s - state.entered_at_s;
      const double scale = std::clamp(1.0 - elapsed / cfg.backup_ramp_s, 0.0, 1.0);
      return CommandGate{Mode::BackupActive, scale, true};
    }
    case Mode::ActuationDisabled:
      return CommandGate{Mode::ActuationDisabled, 0.0, false};
    case Mode::ManualOverride:
      return CommandGate{Mode::ManualOverride, 0.0, false};
  }
  return CommandGate{Mode::ActuationDisabled, 0.0, false};
}

}  // namespace

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::Nominal: return "Nominal";
    case Mode::BackupActive: return "BackupActive";
    case Mode::ActuationDisabled: return "ActuationDisabled";
    case Mode::ManualOverride: return "ManualOverride";
  }
  return "Unknown";
}

void SupervisionConfig::validate() const {
  if (!(comm_stale_backup_s > 0.0) || !(comm_stale_disable_s > comm_stale_backup_s)) {
    throw std::invalid_argument("supervision requires 0 < comm_stale_backup_s < comm_stale_disable_s");
  }
  if (!(control_tick_timeout_s > 0.0)) {
    throw std::invalid_argument("supervision requires control_tick_timeout_s > 0");
  }
  if (!(backup_ramp_s > 0.0)) {
    throw std::invalid_argument("supervision requires backup_ramp_s > 0");
  }
}

void SupervisionInputs::validate() const {
  if (last_cam_rx_s > now_s || last_control_s > now_s) {
    throw std::invalid_argument("supervision input timestamps must not exceed now_s");
  }
}

StepResult step(const SupervisionState& state, const SupervisionInputs& inputs,
                const SupervisionConfig& cfg) {
  cfg.validate();
  inputs.validate();

  SupervisionState next = state;
  std::string trigger;

  const double cam_age = inputs.now_s - inputs.last_cam_rx_s;
  const double control_gap = inputs.now_s - inputs.last_control_s;
  const bool manual = manual_on_enabled_channel(inputs, cfg);
  const bool disable_comm = cam_age > cfg.comm_stale_disable_s;
  const bool disable_control = control_gap > cfg.control_tick_timeout_s + cfg.backup_ramp_s;
  const bool backup_comm = cam_age > cfg.comm_stale_backup_s;
  const bool backup_control = control_gap > cfg.control_tick_timeout_s;
  const bool backup_solver = !inputs.controller_converged;

  switch (state.mode) {
    case Mode::ActuationDisabled:
      // Absorbing; re-engagement is an operator action outside the automaton.
      break;
    case Mode::ManualOverride:
      break;
    case Mode::Nominal:
    case Mode::BackupActive:
      if (manual) {
        next.mode = Mode::ManualOverride;
        trigger = "manual_override";
      } else if (disable_comm || disable_control) {
        next.mode = Mode::ActuationDisabled;
        trigger = disable_comm ? "comm_stale_disable" : "control_timeout_disable";
      } else if (backup_comm || backup_control || backup_solver) {
        if (state.mode != Mode::BackupActive) {
          next.mode = Mode::BackupActive;
          trigger = backup_comm ? "comm_stale_backup"
                   : backup_control ? "control_timeout_backup"
                                    : "controller_nonconverged";
        }
      } else if (state.mode == Mode::BackupActive) {
        next.mode = Mode::Nominal;
        trigger = "recovered";
      }
      break;
  }

  if (next.mode != state.mode) {
    next.entered_at_s = inputs.now_s;
  }
  return StepResult{next, gate_for(next, inputs.now_s, cfg), trigger};
}

GatedCommand gate_command(const CommandGate& gate, double raw_accel_mps2) {
  if (!gate.actuation_on) {
    return GatedCommand{0.0, false};
  }
  return GatedCommand{raw_accel_mps2 * gate.scale, true};
}

}  // namespace syncdrive::supervision
