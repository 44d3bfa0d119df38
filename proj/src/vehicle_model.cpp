#include "syncdrive/vehicle_model.hpp"

#include <cmath>
#include <stdexcept>

namespace syncdrive::model {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void LeadProfile::validate() const {
  if (!std::isfinite(amplitude_mps2) || !std::isfinite(period_s) || !std::isfinite(offset_mps2)) {
    throw std::invalid_argument("lead profile parameters must be finite");
  }
  if (kind == LeadProfileKind::Sine && period_s <= 0.0) {
    throw std::invalid_argument("sine lead profile requires period_s > 0");
  }
  if (kind == LeadProfileKind::Piecewise) {
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
      if (!std::isfinite(breakpoints[i].first) || !std::isfinite(breakpoints[i].second)) {
        throw std::invalid_argument("piecewise breakpoints must be finite");
      }
      if (i > 0 && breakpoints[i].first <= breakpoints[i - 1].first) {
        throw std::invalid_argument("piecewise breakpoints must be strictly increasing in time");
      }
    }
  }
}

VehicleState step_state(const VehicleState& state, double command_accel_mps2, double dt_s) {
  if (!std::isfinite(state.position_m) || !std::isfinite(state.speed_mps) ||
      !std::isfinite(command_accel_mps2) || !std::isfinite(dt_s)) {
    throw std::invalid_argument("step_state requires finite state and command");
  }
  if (dt_s <= 0.0) {
    throw std::invalid_argument("step_state requires dt_s > 0");
  }

  VehicleState next = state;
  next.timestamp_s = state.timestamp_s + dt_s;

  const double v_unclamped = state.speed_mps + command_accel_mps2 * dt_s;
  if (v_unclamped < 0.0) {
    // Stops within the step: advance only by the distance to standstill.
    const double t_stop =
        command_accel_mps2 != 0.0 ? -state.speed_mps / command_accel_mps2 : 0.0;
    next.position_m = state.position_m + state.speed_mps * t_stop +
                      0.5 * command_accel_mps2 * t_stop * t_stop;
    next.speed_mps = 0.0;
    next.accel_mps2 = 0.0;
  } else {
    next.position_m = state.position_m + state.speed_mps * dt_s +
                      0.5 * command_accel_mps2 * dt_s * dt_s;
    next.speed_mps = v_unclamped;
    next.accel_mps2 = command_accel_mps2;
  }
  return next;
}

double lead_accel(const LeadProfile& profile, double t_s) {
  if (!(t_s >= 0.0)) {
    throw std::invalid_argument("lead_accel requires t_s >= 0");
  }
  profile.validate();
  switch (profile.kind) {
    case LeadProfileKind::Constant:
      return profile.offset_mps2;
    case LeadProfileKind::Sine:
      return profile.offset_mps2 +
             profile.amplitude_mps2 * std::sin(kTwoPi * t_s / profile.period_s);
    case LeadProfileKind::Piecewise: {
      double value = 0.0;
      for (const auto& [time_s, accel] : profile.breakpoints) {
        if (time_s > t_s) break;
        value = accel;
      }
      return value;
    }
  }
  throw std::invalid_argument("unknown lead profile kind");
}

}  // namespace syncdrive::model
