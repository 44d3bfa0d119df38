#include "syncdrive/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace syncdrive::cli {

namespace {

using ordered_json = nlohmann::ordered_json;
using model::LeadProfileKind;
using supervision::Channel;

void expect_keys(const ordered_json& j, const std::string& context,
                 const std::set<std::string>& allowed) {
  if (!j.is_object()) {
    throw std::invalid_argument("config section '" + context + "' must be an object");
  }
  for (const auto& item : j.items()) {
    if (allowed.count(item.key()) == 0) {
      std::string valid;
      for (const auto& k : allowed) {
        if (!valid.empty()) valid += ", ";
        valid += k;
      }
      throw std::invalid_argument("unknown key '" + item.key() + "' in '" + context +
                                  "'; valid keys: " + valid);
    }
  }
}

double get_num(const ordered_json& j, const char* key, double fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) {
    throw std::invalid_argument(std::string("config key '") + key + "' must be a number");
  }
  return it->get<double>();
}

std::int64_t get_int(const ordered_json& j, const char* key, std::int64_t fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) {
    throw std::invalid_argument(std::string("config key '") + key + "' must be an integer");
  }
  return it->get<std::int64_t>();
}

bool get_bool(const ordered_json& j, const char* key, bool fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) {
    throw std::invalid_argument(std::string("config key '") + key + "' must be a boolean");
  }
  return it->get<bool>();
}

std::string get_str(const ordered_json& j, const char* key, const std::string& fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_string()) {
    throw std::invalid_argument(std::string("config key '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

LeadProfileKind kind_from_string(const std::string& s) {
  if (s == "constant") return LeadProfileKind::Constant;
  if (s == "sine") return LeadProfileKind::Sine;
  if (s == "piecewise") return LeadProfileKind::Piecewise;
  throw std::invalid_argument("lead_profile.kind must be one of: constant, sine, piecewise");
}

const char* kind_to_string(LeadProfileKind k) {
  switch (k) {
    case LeadProfileKind::Constant: return "constant";
    case LeadProfileKind::Sine: return "sine";
    case LeadProfileKind::Piecewise: return "piecewise";
  }
  return "constant";
}

model::LeadProfile parse_lead_profile(const ordered_json& j) {
  expect_keys(j, "lead_profile",
              {"kind", "amplitude_mps2", "period_s", "offset_mps2", "breakpoints"});
  model::LeadProfile p;
  p.kind = kind_from_string(get_str(j, "kind", "constant"));
  p.amplitude_mps2 = get_num(j, "amplitude_mps2", 0.0);
  p.period_s = get_num(j, "period_s", 30.0);
  p.offset_mps2 = get_num(j, "offset_mps2", 0.0);
  if (const auto it = j.find("breakpoints"); it != j.end()) {
    if (!it->is_array()) {
      throw std::invalid_argument("lead_profile.breakpoints must be an array of [time, accel]");
    }
    for (const auto& bp : *it) {
      if (!bp.is_array() || bp.size() != 2 || !bp[0].is_number() || !bp[1].is_number()) {
        throw std::invalid_argument("lead_profile.breakpoints entries must be [time, accel]");
      }
      p.breakpoints.emplace_back(bp[0].get<double>(), bp[1].get<double>());
    }
  }
  return p;
}

model::VehicleState parse_initial_state(const ordered_json& j, const std::string& context,
                                        const model::VehicleState& fallback) {
  expect_keys(j, context, {"position_m", "speed_mps", "accel_mps2"});
  model::VehicleState s;
  s.position_m = get_num(j, "position_m", fallback.position_m);
  s.speed_mps = get_num(j, "speed_mps", fallback.speed_mps);
  s.accel_mps2 = get_num(j, "accel_mps2", fallback.accel_mps2);
  s.timestamp_s = 0.0;
  return s;
}

mpc::MpcConfig parse_mpc(const ordered_json& j) {
  expect_keys(j, "mpc",
              {"c_v", "c_a", "c_u", "t_s", "horizon", "a_min", "a_max", "solver_tol",
               "max_iters"});
  mpc::MpcConfig cfg;
  cfg.c_v = get_num(j, "c_v", cfg.c_v);
  cfg.c_a = get_num(j, "c_a", cfg.c_a);
  cfg.c_u = get_num(j, "c_u", cfg.c_u);
  cfg.t_s = get_num(j, "t_s", cfg.t_s);
  cfg.horizon = static_cast<int>(get_int(j, "horizon", cfg.horizon));
  cfg.a_min = get_num(j, "a_min", cfg.a_min);
  cfg.a_max = get_num(j, "a_max", cfg.a_max);
  cfg.solver_tol = get_num(j, "solver_tol", cfg.solver_tol);
  cfg.max_iters = static_cast<int>(get_int(j, "max_iters", cfg.max_iters));
  return cfg;
}

v2x::NetworkModel parse_network(const ordered_json& j) {
  // No seed key here: the top-level scenario seed is the single knob.
  expect_keys(j, "network", {"base_latency_ms", "jitter_ms", "loss_prob", "reorder_allowed"});
  v2x::NetworkModel net;
  net.base_latency_ms = get_num(j, "base_latency_ms", net.base_latency_ms);
  net.jitter_ms = get_num(j, "jitter_ms", net.jitter_ms);
  net.loss_prob = get_num(j, "loss_prob", net.loss_prob);
  net.reorder_allowed = get_bool(j, "reorder_allowed", net.reorder_allowed);
  return net;
}

std::set<Channel> parse_channels(const ordered_json& arr) {
  std::set<Channel> channels;
  if (!arr.is_array()) {
    throw std::invalid_argument("supervision.channels_enabled must be an array");
  }
  for (const auto& c : arr) {
    if (!c.is_string()) {
      throw std::invalid_argument("supervision.channels_enabled entries must be strings");
    }
    const std::string name = c.get<std::string>();
    if (name == "longitudinal") {
      channels.insert(Channel::Longitudinal);
    } else if (name == "lateral") {
      channels.insert(Channel::Lateral);
    } else {
      throw std::invalid_argument("unknown channel '" + name +
                                  "'; valid channels: longitudinal, lateral");
    }
  }
  return channels;
}

supervision::SupervisionConfig parse_supervision(const ordered_json& j) {
  expect_keys(j, "supervision",
              {"comm_stale_backup_s", "comm_stale_disable_s", "control_tick_timeout_s",
               "backup_ramp_s", "channels_enabled"});
  supervision::SupervisionConfig cfg;
  cfg.comm_stale_backup_s = get_num(j, "comm_stale_backup_s", cfg.comm_stale_backup_s);
  cfg.comm_stale_disable_s = get_num(j, "comm_stale_disable_s", cfg.comm_stale_disable_s);
  cfg.control_tick_timeout_s = get_num(j, "control_tick_timeout_s", cfg.control_tick_timeout_s);
  cfg.backup_ramp_s = get_num(j, "backup_ramp_s", cfg.backup_ramp_s);
  if (const auto it = j.find("channels_enabled"); it != j.end()) {
    cfg.channels_enabled = parse_channels(*it);
  }
  return cfg;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("no such file: " + path);
  }
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed config " + path + ": " + e.what());
  }
  return run_config_from_json(doc);
}

RunConfig run_config_from_json(const ordered_json& doc) {
  expect_keys(doc, "config",
              {"run_name", "output_dir", "seed", "duration_s", "sim_dt_s",
               "controller_period_s", "cam_rate_hz", "clock_skew_ms", "lead_profile",
               "lead_initial", "follower_initial", "mpc", "network", "supervision"});

  RunConfig config;
  config.run_name = get_str(doc, "run_name", config.run_name);
  if (const auto it = doc.find("output_dir"); it != doc.end()) {
    if (!it->is_string()) {
      throw std::invalid_argument("config key 'output_dir' must be a string");
    }
    config.output_dir = it->get<std::string>();
    config.output_dir_set = true;
  }

  sim::Scenario& sc = config.scenario;
  const auto seed = get_int(doc, "seed", static_cast<std::int64_t>(sc.seed));
  if (seed < 0) {
    throw std::invalid_argument("config key 'seed' must be non-negative");
  }
  sc.seed = static_cast<std::uint64_t>(seed);
  sc.duration_s = get_num(doc, "duration_s", sc.duration_s);
  sc.sim_dt_s = get_num(doc, "sim_dt_s", sc.sim_dt_s);
  sc.controller_period_s = get_num(doc, "controller_period_s", sc.controller_period_s);
  sc.cam_rate_hz = get_num(doc, "cam_rate_hz", sc.cam_rate_hz);
  sc.clock_skew_ms = get_num(doc, "clock_skew_ms", sc.clock_skew_ms);
  if (const auto it = doc.find("lead_profile"); it != doc.end()) {
    sc.lead_profile = parse_lead_profile(*it);
  }
  if (const auto it = doc.find("lead_initial"); it != doc.end()) {
    sc.lead_initial = parse_initial_state(*it, "lead_initial", sc.lead_initial);
  }
  if (const auto it = doc.find("follower_initial"); it != doc.end()) {
    sc.follower_initial = parse_initial_state(*it, "follower_initial", sc.follower_initial);
  }
  if (const auto it = doc.find("mpc"); it != doc.end()) {
    sc.mpc = parse_mpc(*it);
  }
  if (const auto it = doc.find("network"); it != doc.end()) {
    sc.network = parse_network(*it);
  }
  if (const auto it = doc.find("supervision"); it != doc.end()) {
    sc.supervision = parse_supervision(*it);
  }

  sc.validate();
  return config;
}

ordered_json run_config_to_json(const RunConfig& config) {
  const sim::Scenario& sc = config.scenario;
  ordered_json doc;
  doc["run_name"] = config.run_name;
  doc["output_dir"] = config.output_dir;
  doc["seed"] = sc.seed;
  doc["duration_s"] = sc.duration_s;
  doc["sim_dt_s"] = sc.sim_dt_s;
  doc["controller_period_s"] = sc.controller_period_s;
  doc["cam_rate_hz"] = sc.cam_rate_hz;
  doc["clock_skew_ms"] = sc.clock_skew_ms;

  ordered_json profile;
  profile["kind"] = kind_to_string(sc.lead_profile.kind);
  profile["amplitude_mps2"] = sc.lead_profile.amplitude_mps2;
  profile["period_s"] = sc.lead_profile.period_s;
  profile["offset_mps2"] = sc.lead_profile.offset_mps2;
  if (!sc.lead_profile.breakpoints.empty()) {
    ordered_json bps = ordered_json::array();
    for (const auto& [time_s, accel] : sc.lead_profile.breakpoints) {
      bps.push_back({time_s, accel});
    }
    profile["breakpoints"] = std::move(bps);
  }
  doc["lead_profile"] = std::move(profile);

  const auto state_json = [](const model::VehicleState& s) {
    ordered_json j;
    j["position_m"] = s.position_m;
    j["speed_mps"] = s.speed_mps;
    j["accel_mps2"] = s.accel_mps2;
    return j;
  };
  doc["lead_initial"] = state_json(sc.lead_initial);
  doc["follower_initial"] = state_json(sc.follower_initial);

  ordered_json mpc_json;
  mpc_json["c_v"] = sc.mpc.c_v;
  mpc_json["c_a"] = sc.mpc.c_a;
  mpc_json["c_u"] = sc.mpc.c_u;
  mpc_json["t_s"] = sc.mpc.t_s;
  mpc_json["horizon"] = sc.mpc.horizon;
  mpc_json["a_min"] = sc.mpc.a_min;
  mpc_json["a_max"] = sc.mpc.a_max;
  mpc_json["solver_tol"] = sc.mpc.solver_tol;
  mpc_json["max_iters"] = sc.mpc.max_iters;
  doc["mpc"] = std::move(mpc_json);

  ordered_json net_json;
  net_json["base_latency_ms"] = sc.network.base_latency_ms;
  net_json["jitter_ms"] = sc.network.jitter_ms;
  net_json["loss_prob"] = sc.network.loss_prob;
  net_json["reorder_allowed"] = sc.network.reorder_allowed;
  doc["network"] = std::move(net_json);

  ordered_json sup_json;
  sup_json["comm_stale_backup_s"] = sc.supervision.comm_stale_backup_s;
  sup_json["comm_stale_disable_s"] = sc.supervision.comm_stale_disable_s;
  sup_json["control_tick_timeout_s"] = sc.supervision.control_tick_timeout_s;
  sup_json["backup_ramp_s"] = sc.supervision.backup_ramp_s;
  ordered_json channels = ordered_json::array();
  if (sc.supervision.channels_enabled.count(Channel::Longitudinal)) {
    channels.push_back("longitudinal");
  }
  if (sc.supervision.channels_enabled.count(Channel::Lateral)) {
    channels.push_back("lateral");
  }
  sup_json["channels_enabled"] = std::move(channels);
  doc["supervision"] = std::move(sup_json);

  return doc;
}

void apply_override(ordered_json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("override must have the form key=value: " + assignment);
  }
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  ordered_json parsed;
  try {
    parsed = ordered_json::parse(value);
  } catch (const nlohmann::json::parse_error&) {
    parsed = value;  // plain string
  }

  ordered_json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) {
      throw std::invalid_argument("override path has an empty segment: " + path);
    }
    if (dot == std::string::npos) {
      (*node)[key] = std::move(parsed);
      return;
    }
    node = &(*node)[key];
    if (!node->is_object() && !node->is_null()) {
      throw std::invalid_argument("override path '" + path + "' descends into a non-object");
    }
    start = dot + 1;
  }
}

std::string run_file_stem(const RunConfig& config) {
  return config.run_name + "_seed" + std::to_string(config.scenario.seed);
}

}  // namespace syncdrive::cli
