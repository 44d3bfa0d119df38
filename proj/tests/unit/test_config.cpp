#include "syncdrive/config.hpp"

#include <string>

#include <stdexcept>

#include "doctest.h"

using namespace syncdrive;
using nlohmann::ordered_json;

namespace {

ordered_json minimal_doc() {
  return ordered_json::parse(R"({
    "run_name": "test",
    "seed": 9,
    "duration_s": 5.0,
    "lead_profile": {"kind": "sine", "amplitude_mps2": 0.5, "period_s": 30.0}
  })");
}

}  // namespace

TEST_CASE("config: minimal document fills defaults") {
  const cli::RunConfig config = cli::run_config_from_json(minimal_doc());
  CHECK(config.run_name == "test");
  CHECK(config.scenario.seed == 9);
  CHECK(config.scenario.duration_s == doctest::Approx(5.0));
  CHECK(config.scenario.sim_dt_s == doctest::Approx(0.02));
  CHECK(config.scenario.mpc.horizon == 15);
  CHECK(config.scenario.mpc.t_s == doctest::Approx(0.2));
  CHECK(config.scenario.lead_profile.kind == model::LeadProfileKind::Sine);
  CHECK_FALSE(config.output_dir_set);
  CHECK(cli::run_file_stem(config) == "test_seed9");
}

TEST_CASE("config: unknown keys rejected with the valid set listed") {
  ordered_json doc = minimal_doc();
  doc["mqc"] = ordered_json::object();
  try {
    cli::run_config_from_json(doc);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find("mqc") != std::string::npos);
    CHECK(what.find("valid keys") != std::string::npos);
    CHECK(what.find("mpc") != std::string::npos);
  }

  doc = minimal_doc();
  doc["mpc"] = ordered_json::object();
  doc["mpc"]["horizonn"] = 3;
  try {
    cli::run_config_from_json(doc);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find("horizonn") != std::string::npos);
    CHECK(what.find("horizon") != std::string::npos);
  }
}

TEST_CASE("config: scenario invariants re-validated on load") {
  ordered_json doc = minimal_doc();
  doc["mpc"]["horizon"] = 0;
  try {
    cli::run_config_from_json(doc);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("horizon") != std::string::npos);
  }

  doc = minimal_doc();
  doc["network"]["loss_prob"] = 1.5;
  CHECK_THROWS_AS(cli::run_config_from_json(doc), std::invalid_argument);
}

TEST_CASE("config: emit then load preserves all effective values") {
  ordered_json doc = minimal_doc();
  doc["network"] = {{"base_latency_ms", 40.0}, {"jitter_ms", 10.0}, {"loss_prob", 0.01}};
  doc["supervision"] = {{"channels_enabled", {"longitudinal", "lateral"}}};
  doc["lead_profile"]["kind"] = "piecewise";
  doc["lead_profile"]["breakpoints"] = {{0.0, 0.3}, {10.0, -0.3}};
  doc["follower_initial"] = {{"speed_mps", 3.5}};
  const cli::RunConfig original = cli::run_config_from_json(doc);

  const cli::RunConfig reloaded = cli::run_config_from_json(cli::run_config_to_json(original));

  CHECK(reloaded.run_name == original.run_name);
  CHECK(reloaded.output_dir == original.output_dir);
  const sim::Scenario& a = original.scenario;
  const sim::Scenario& b = reloaded.scenario;
  CHECK(b.seed == a.seed);
  CHECK(b.duration_s == a.duration_s);
  CHECK(b.sim_dt_s == a.sim_dt_s);
  CHECK(b.controller_period_s == a.controller_period_s);
  CHECK(b.cam_rate_hz == a.cam_rate_hz);
  CHECK(b.lead_profile.kind == a.lead_profile.kind);
  CHECK(b.lead_profile.breakpoints == a.lead_profile.breakpoints);
  CHECK(b.lead_initial.speed_mps == a.lead_initial.speed_mps);
  CHECK(b.follower_initial.speed_mps == a.follower_initial.speed_mps);
  CHECK(b.mpc.c_v == a.mpc.c_v);
  CHECK(b.mpc.c_a == a.mpc.c_a);
  CHECK(b.mpc.c_u == a.mpc.c_u);
  CHECK(b.mpc.horizon == a.mpc.horizon);
  CHECK(b.mpc.solver_tol == a.mpc.solver_tol);
  CHECK(b.network.base_latency_ms == a.network.base_latency_ms);
  CHECK(b.network.jitter_ms == a.network.jitter_ms);
  CHECK(b.network.loss_prob == a.network.loss_prob);
  CHECK(b.network.reorder_allowed == a.network.reorder_allowed);
  CHECK(b.supervision.comm_stale_backup_s == a.supervision.comm_stale_backup_s);
  CHECK(b.supervision.channels_enabled == a.supervision.channels_enabled);
}

TEST_CASE("config: overrides parse values as JSON with string fallback") {
  ordered_json doc = minimal_doc();
  cli::apply_override(doc, "network.loss_prob=0.25");
  cli::apply_override(doc, "mpc.horizon=5");
  cli::apply_override(doc, "lead_profile.kind=constant");
  cli::apply_override(doc, "network.reorder_allowed=false");
  cli::apply_override(doc, "lead_profile.breakpoints=[[0,0.3],[10,-0.3]]");

  CHECK(doc["network"]["loss_prob"] == 0.25);
  CHECK(doc["mpc"]["horizon"] == 5);
  CHECK(doc["lead_profile"]["kind"] == "constant");
  CHECK(doc["network"]["reorder_allowed"] == false);

  cli::apply_override(doc, "lead_profile.kind=piecewise");
  const cli::RunConfig config = cli::run_config_from_json(doc);
  CHECK(config.scenario.network.loss_prob == doctest::Approx(0.25));
  CHECK(config.scenario.mpc.horizon == 5);
  REQUIRE(config.scenario.lead_profile.breakpoints.size() == 2);
  CHECK(config.scenario.lead_profile.breakpoints[1].first == doctest::Approx(10.0));

  CHECK_THROWS_AS(cli::apply_override(doc, "novalue"), std::invalid_argument);
  CHECK_THROWS_AS(cli::apply_override(doc, "=5"), std::invalid_argument);
}

TEST_CASE("config: channels and kind validation") {
  ordered_json doc = minimal_doc();
  doc["supervision"]["channels_enabled"] = {"sideways"};
  CHECK_THROWS_AS(cli::run_config_from_json(doc), std::invalid_argument);

  doc = minimal_doc();
  doc["lead_profile"]["kind"] = "triangle";
  CHECK_THROWS_AS(cli::run_config_from_json(doc), std::invalid_argument);
}

TEST_CASE("config: missing file and malformed json") {
  CHECK_THROWS_AS(cli::load_run_config("/nonexistent/config.json"), std::runtime_error);
}
