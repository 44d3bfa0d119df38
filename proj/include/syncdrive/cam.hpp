#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace syncdrive::v2x {

// Cooperative awareness message: the kinematic snapshot one vehicle shares
// with the others. The wire format is a flat JSON object with exactly these
// field names in this order:
//   station_id, generation_time_ms, x_m, y_m, heading_rad, speed_mps,
//   accel_mps2, curvature_inv_m
// Reals are rendered with their shortest round-trip representation, so
// decode(encode(m)) == m holds field for field.
struct CamMessage {
  std::uint32_t station_id = 0;
  std::uint64_t generation_time_ms = 0;  // sender clock, milliseconds
  double x_m = 0.0;
  double y_m = 0.0;
  double heading_rad = 0.0;  // [0, 2*pi)
  double speed_mps = 0.0;    // >= 0
  double accel_mps2 = 0.0;
  double curvature_inv_m = 0.0;

  bool operator==(const CamMessage&) const = default;

  // Throws std::invalid_argument when invariants are violated
  // (finite fields, speed >= 0, heading in [0, 2*pi)).
  void validate() const;
};

// Decode failure carrying the offending field name (empty when the payload
// itself is malformed).
class CamDecodeError : public std::runtime_error {
 public:
  CamDecodeError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Serializes a valid message to its canonical payload. Invariant violations
// are refused with std::invalid_argument.
std::string encode_cam(const CamMessage& msg);

// Parses a payload. Unknown extra fields are ignored for forward
// compatibility; a missing or mistyped required field raises CamDecodeError
// naming it.
CamMessage decode_cam(std::string_view payload);

// Canonical CAM topic for a station: "vehicles/<station_id>/cam".
std::string cam_topic(std::uint32_t station_id);

// Inverse of cam_topic; nullopt when the topic is not a canonical CAM topic.
std::optional<std::uint32_t> station_from_topic(std::string_view topic);

// Topic filter matching: exact segments plus the single-level wildcard '+'
// ("vehicles/+/cam"). Throws std::invalid_argument on an invalid pattern
// (empty, or '+' embedded inside a segment, or the unsupported '#').
bool topic_matches(std::string_view pattern, std::string_view topic);

}  // namespace syncdrive::v2x
