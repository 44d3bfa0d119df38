#include "syncdrive/cam.hpp"

#include <cmath>
#include <charconv>

#include "json.hpp"

namespace syncdrive::v2x {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

using ordered_json = nlohmann::ordered_json;

double require_number(const ordered_json& j, const char* field) {
  const auto it = j.find(field);
  if (it == j.end()) {
    throw CamDecodeError(field, std::string("cam payload missing field: ") + field);
  }
  if (!it->is_number()) {
    throw CamDecodeError(field, std::string("cam field is not a number: ") + field);
  }
  return it->get<double>();
}

std::uint64_t require_unsigned(const ordered_json& j, const char* field) {
  const auto it = j.find(field);
  if (it == j.end()) {
    throw CamDecodeError(field, std::string("cam payload missing field: ") + field);
  }
  if (!it->is_number_integer() ||
      (!it->is_number_unsigned() && it->get<std::int64_t>() < 0)) {
    throw CamDecodeError(field, std::string("cam field is not an unsigned integer: ") + field);
  }
  return it->get<std::uint64_t>();
}

}  // namespace

void CamMessage::validate() const {
  const double reals[] = {x_m, y_m, heading_rad, speed_mps, accel_mps2, curvature_inv_m};
  for (double v : reals) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("cam message fields must be finite");
    }
  }
  if (speed_mps < 0.0) {
    throw std::invalid_argument("cam message requires speed_mps >= 0");
  }
  if (heading_rad < 0.0 || heading_rad >= kTwoPi) {
    throw std::invalid_argument("cam message requires heading_rad in [0, 2*pi)");
  }
}

std::string encode_cam(const CamMessage& msg) {
  msg.validate();
  ordered_json j;
  j["station_id"] = msg.station_id;
  j["generation_time_ms"] = msg.generation_time_ms;
  j["x_m"] = msg.x_m;
  j["y_m"] = msg.y_m;
  j["heading_rad"] = msg.heading_rad;
  j["speed_mps"] = msg.speed_mps;
  j["accel_mps2"] = msg.accel_mps2;
  j["curvature_inv_m"] = msg.curvature_inv_m;
  return j.dump();
}

CamMessage decode_cam(std::string_view payload) {
  ordered_json j;
  try {
    j = ordered_json::parse(payload);
  } catch (const nlohmann::json::parse_error& e) {
    throw CamDecodeError("", std::string("malformed cam payload: ") + e.what());
  }
  if (!j.is_object()) {
    throw CamDecodeError("", "cam payload is not an object");
  }
  CamMessage msg;
  msg.station_id = static_cast<std::uint32_t>(require_unsigned(j, "station_id"));
  msg.generation_time_ms = require_unsigned(j, "generation_time_ms");
  msg.x_m = require_number(j, "x_m");
  msg.y_m = require_number(j, "y_m");
  msg.heading_rad = require_number(j, "heading_rad");
  msg.speed_mps = require_number(j, "speed_mps");
  msg.accel_mps2 = require_number(j, "accel_mps2");
  msg.curvature_inv_m = require_number(j, "curvature_inv_m");
  return msg;
}

std::string cam_topic(std::uint32_t station_id) {
  return "vehicles/" + std::to_string(station_id) + "/cam";
}

std::optional<std::uint32_t> station_from_topic(std::string_view topic) {
  constexpr std::string_view prefix = "vehicles/";
  constexpr std::string_view suffix = "/cam";
  if (topic.size() <= prefix.size() + suffix.size()) return std::nullopt;
  if (topic.substr(0, prefix.size()) != prefix) return std::nullopt;
  if (topic.substr(topic.size() - suffix.size()) != suffix) return std::nullopt;
  const std::string_view id_part =
      topic.substr(prefix.size(), topic.size() - prefix.size() - suffix.size());
  std::uint32_t id = 0;
  const auto [ptr, ec] = std::from_chars(id_part.data(), id_part.data() + id_part.size(), id);
  if (ec != std::errc{} || ptr != id_part.data() + id_part.size()) return std::nullopt;
  return id;
}

bool topic_matches(std::string_view pattern, std::string_view topic) {
  if (pattern.empty()) {
    throw std::invalid_argument("topic pattern must not be empty");
  }
  // Validate: '+' must occupy a whole segment; '#' is not supported.
  std::size_t seg_start = 0;
  for (std::size_t i = 0; i <= pattern.size(); ++i) {
    if (i == pattern.size() || pattern[i] == '/') {
      const std::string_view seg = pattern.substr(seg_start, i - seg_start);
      if (seg.find('#') != std::string_view::npos) {
        throw std::invalid_argument("multi-level wildcard '#' is not supported");
      }
      if (seg.find('+') != std::string_view::npos && seg != "+") {
        throw std::invalid_argument("'+' must occupy a whole topic segment");
      }
      seg_start = i + 1;
    }
  }

  std::size_t p = 0, t = 0;
  while (true) {
    const std::size_t p_end = pattern.find('/', p);
    const std::size_t t_end = topic.find('/', t);
    const std::string_view p_seg =
        pattern.substr(p, (p_end == std::string_view::npos ? pattern.size() : p_end) - p);
    const std::string_view t_seg =
        topic.substr(t, (t_end == std::string_view::npos ? topic.size() : t_end) - t);
    if (p_seg != "+" && p_seg != t_seg) return false;
    const bool p_done = p_end == std::string_view::npos;
    const bool t_done = t_end == std::string_view::npos;
    if (p_done || t_done) return p_done && t_done;
    p = p_end + 1;
    t = t_end + 1;
  }
}

}  // namespace syncdrive::v2x
