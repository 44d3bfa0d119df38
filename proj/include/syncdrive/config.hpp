#pragma once

#include <string>

#include "json.hpp"
#include "syncdrive/scenario.hpp"

namespace syncdrive::cli {

// A scenario file: the Scenario fields plus run bookkeeping. JSON, strict
// schema: unknown keys anywhere are rejected with a message listing the valid
// ones; every key is optional and falls back to the built-in default; all
// scenario invariants are re-validated after parsing.
struct RunConfig {
  sim::Scenario scenario;
  std::string run_name = "run";
  std::string output_dir = ".";
  bool output_dir_set = false;  // whether the file (or an override) named it
};

RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json(const nlohmann::ordered_json& doc);

// Emits every effective value, so load(emit(c)) reproduces c exactly.
nlohmann::ordered_json run_config_to_json(const RunConfig& config);

// Applies one "dotted.path=value" assignment onto a config document. The
// value is parsed as JSON when possible and taken as a string otherwise.
// Schema errors surface later, when the document is parsed strictly.
void apply_override(nlohmann::ordered_json& doc, const std::string& assignment);

// Base name for a run's output files: "<run_name>_seed<seed>".
std::string run_file_stem(const RunConfig& config);

}  // namespace syncdrive::cli
