#pragma once

#include <set>
#include <string>

namespace syncdrive::supervision {

enum class Channel { Longitudinal, Lateral };

enum class Mode { Nominal, BackupActive, ActuationDisabled, ManualOverride };

const char* mode_name(Mode mode);

// Staleness thresholds and degradation behaviour of the safety automaton.
struct SupervisionConfig {
  double comm_stale_backup_s = 0.5;   // reference-message age activating backup
  double comm_stale_disable_s = 2.0;  // reference-message age disabling actuation
  double control_tick_timeout_s = 0.6;  // max gap between controller outputs
  double backup_ramp_s = 2.0;            // command ramp-to-zero duration in backup
  std::set<Channel> channels_enabled = {Channel::Longitudinal};

  void validate() const;  // throws std::invalid_argument
};

// Everything the automaton observes during one tick, assembled by the caller.
struct SupervisionInputs {
  double now_s = 0.0;
  double last_cam_rx_s = 0.0;    // time of the last valid reference message
  double last_control_s = 0.0;   // time of the last controller output
  bool controller_converged = true;
  std::set<Channel> manual_input;  // channels the driver touched this tick

  void validate() const;  // timestamps must not be in the future
};

struct SupervisionState {
  Mode mode = Mode::Nominal;
  double entered_at_s = 0.0;
};

// How the current mode shapes the outgoing actuation command.
struct CommandGate {
  Mode mode = Mode::Nominal;
  double scale = 1.0;        // 1 pass-through, ramp factor in backup, else 0
  bool actuation_on = true;
};

struct StepResult {
  SupervisionState state;
  CommandGate gate;
  // Non-empty exactly when the mode changed; names the transition cause.
  std::string trigger;
};

// Advances the automaton one tick. Priority, highest first:
//   1. driver touches an enabled channel            -> ManualOverride
//   2. cam age beyond the disable threshold, or a controller gap persisting
//      beyond timeout + ramp                        -> ActuationDisabled
//   3. cam age beyond the backup threshold, controller gap beyond timeout,
//      or a non-converged controller                -> BackupActive
//   4. otherwise Nominal (recovery to Nominal is only possible from
//      BackupActive; ActuationDisabled and ManualOverride are absorbing).
// Pure function of (state, inputs, cfg).
StepResult step(const SupervisionState& state, const SupervisionInputs& inputs,
                const SupervisionConfig& cfg);

struct GatedCommand {
  double accel_mps2 = 0.0;
  bool actuation_on = true;
};

// Applies a gate to a raw controller command. With actuation off the output
// acceleration is exactly zero.
GatedCommand gate_command(const CommandGate& gate, double raw_accel_mps2);

}  // namespace syncdrive::supervision
