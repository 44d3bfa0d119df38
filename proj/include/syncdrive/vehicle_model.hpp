#pragma once

#include <vector>

namespace syncdrive::model {

// Longitudinal kinematic state of one vehicle on a 1-D track.
struct VehicleState {
  double position_m = 0.0;   // arc length along the track [m]
  double speed_mps = 0.0;    // >= 0, the plant clamps at standstill
  double accel_mps2 = 0.0;   // realized acceleration over the last step [m/s^2]
  double timestamp_s = 0.0;  // simulation clock [s]
};

enum class LeadProfileKind { Constant, Sine, Piecewise };

// Open-loop acceleration profile driving the lead vehicle.
struct LeadProfile {
  LeadProfileKind kind = LeadProfileKind::Constant;
  double amplitude_mps2 = 0.0;
  double period_s = 30.0;
  double offset_mps2 = 0.0;
  // (time [s], acceleration [m/s^2]) pairs, strictly increasing in time.
  std::vector<std::pair<double, double>> breakpoints;

  // Throws std::invalid_argument when the profile invariants are violated.
  void validate() const;
};

// Integrates one plant step of duration dt with a held acceleration command.
// Speed is clamped at standstill: when the command would drive it negative the
// vehicle stops at the standstill point, covers only the distance to it, and
// the realized acceleration is reported as zero.
// Throws std::invalid_argument on non-finite inputs or dt <= 0.
VehicleState step_state(const VehicleState& state, double command_accel_mps2, double dt_s);

// Acceleration of the lead-vehicle profile at time t (pure function).
// Piecewise profiles hold the latest breakpoint value, and are zero before the
// first breakpoint. Throws std::invalid_argument on t < 0 or invalid profile.
double lead_accel(const LeadProfile& profile, double t_s);

}  // namespace syncdrive::model
