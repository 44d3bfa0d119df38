#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "syncdrive/config.hpp"
#include "syncdrive/probe.hpp"
#include "syncdrive/scenario.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace syncdrive;

constexpr const char* kOutputDirEnv = "SYNCDRIVE_OUT_DIR";

struct RunOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;          // --out, beats everything
  std::optional<std::uint64_t> seed;
};

cli::RunConfig load_with_overrides(const RunOptions& opts) {
  std::ifstream in(opts.config_path);
  if (!in) {
    throw std::runtime_error("no such file: " + opts.config_path);
  }
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed config " + opts.config_path + ": " + e.what());
  }
  for (const std::string& assignment : opts.overrides) {
    cli::apply_override(doc, assignment);
  }
  if (opts.seed) {
    doc["seed"] = *opts.seed;
  }
  return cli::run_config_from_json(doc);
}

fs::path resolve_output_dir(const cli::RunConfig& config, const std::string& out_flag) {
  if (!out_flag.empty()) return out_flag;
  if (config.output_dir_set) return config.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return config.output_dir;
}

ordered_json metrics_json(const sim::RunResult& result) {
  const sim::RunMetrics& m = result.metrics;
  ordered_json j;
  j["rms_speed_error_mps"] = m.rms_speed_error_mps;
  j["max_speed_error_mps"] = m.max_speed_error_mps;
  j["mean_latency_ms"] = m.mean_latency_ms;
  j["latency_samples"] = m.latency_samples;
  j["messages_sent"] = m.messages_sent;
  j["messages_delivered"] = m.messages_delivered;
  j["messages_dropped"] = m.messages_dropped;
  ordered_json ticks;
  for (std::size_t i = 0; i < m.ticks_in_mode.size(); ++i) {
    ticks[supervision::mode_name(static_cast<supervision::Mode>(i))] = m.ticks_in_mode[i];
  }
  j["ticks_in_mode"] = std::move(ticks);
  j["final_mode"] = supervision::mode_name(m.final_mode);

  if (result.latency.size() > 0) {
    const latency::LatencyStats stats = result.latency.stats();
    ordered_json sj;
    sj["count"] = stats.count;
    sj["mean_ms"] = stats.mean_ms;
    sj["min_ms"] = stats.min_ms;
    sj["max_ms"] = stats.max_ms;
    sj["p50_ms"] = stats.p50_ms;
    sj["p95_ms"] = stats.p95_ms;
    j["latency_stats"] = std::move(sj);
    ordered_json hist = ordered_json::array();
    for (const latency::HistogramBin& bin : result.latency.export_histogram(1.0)) {
      hist.push_back({bin.bin_start_ms, bin.count});
    }
    j["latency_histogram_1ms"] = std::move(hist);
  }
  return j;
}

std::string summary_line(const cli::RunConfig& config, const sim::RunMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%s: rms=%.4f m/s max=%.4f m/s mean_latency=%.2f ms final_mode=%s",
                config.run_name.c_str(), m.rms_speed_error_mps, m.max_speed_error_mps,
                m.mean_latency_ms, supervision::mode_name(m.final_mode));
  return buf;
}

// Runs one scenario and writes <stem>_trace.csv, <stem>_trace_events.csv and
// <stem>_metrics.json under out_dir.
sim::RunMetrics execute_run(const cli::RunConfig& config, const fs::path& out_dir) {
  const sim::RunResult result = sim::run_scenario(config.scenario);
  fs::create_directories(out_dir);
  const std::string stem = cli::run_file_stem(config);

  sim::export_trace(result.trace, (out_dir / (stem + "_trace.csv")).string());

  const fs::path metrics_path = out_dir / (stem + "_metrics.json");
  std::ofstream metrics_out(metrics_path);
  if (!metrics_out) {
    throw std::runtime_error("cannot open for writing: " + metrics_path.string());
  }
  metrics_out << metrics_json(result).dump(2) << '\n';
  if (!metrics_out.good()) {
    throw std::runtime_error("write failed: " + metrics_path.string());
  }
  return result.metrics;
}

int cmd_run(const RunOptions& opts) {
  const cli::RunConfig config = load_with_overrides(opts);
  const fs::path out_dir = resolve_output_dir(config, opts.out_dir);
  const sim::RunMetrics metrics = execute_run(config, out_dir);
  std::cout << summary_line(config, metrics) << '\n';
  return 0;
}

int cmd_sweep(const RunOptions& opts, const std::string& param,
              const std::vector<std::string>& values) {
  if (values.empty()) {
    throw std::invalid_argument("sweep requires at least one value");
  }
  // Seed policy: every sweep point runs with the same seed so only the swept
  // parameter differs.
  std::string aggregate;
  aggregate += "param,value,rms_speed_error_mps,max_speed_error_mps,mean_latency_ms,"
               "messages_sent,messages_delivered,messages_dropped,final_mode\n";

  fs::path out_dir;
  for (const std::string& value : values) {
    RunOptions point = opts;
    point.overrides.push_back(param + "=" + value);
    cli::RunConfig config = load_with_overrides(point);
    std::string tag = param + "=" + value;
    for (char& c : tag) {
      if (c == '/' || c == ' ') c = '_';
    }
    config.run_name += "_" + tag;
    out_dir = resolve_output_dir(config, opts.out_dir);
    const sim::RunMetrics m = execute_run(config, out_dir);
    std::cout << summary_line(config, m) << '\n';

    char row[256];
    std::snprintf(row, sizeof row, "%s,%s,%.10g,%.10g,%.10g,%llu,%llu,%llu,%s\n", param.c_str(),
                  value.c_str(), m.rms_speed_error_mps, m.max_speed_error_mps, m.mean_latency_ms,
                  static_cast<unsigned long long>(m.messages_sent),
                  static_cast<unsigned long long>(m.messages_delivered),
                  static_cast<unsigned long long>(m.messages_dropped),
                  supervision::mode_name(m.final_mode));
    aggregate += row;
  }

  const fs::path summary_path = out_dir / "sweep_summary.csv";
  std::ofstream out(summary_path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + summary_path.string());
  }
  out << aggregate;
  std::cout << "sweep summary written to " << summary_path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"syncdrive: synchronized-driving simulator and V2X latency tools"};
  app.require_subcommand(1);

  RunOptions run_opts;
  std::uint64_t seed_value = 0;

  CLI::App* run = app.add_subcommand("run", "Run one scenario and write trace/metrics files");
  run->add_option("config", run_opts.config_path, "Scenario config file (JSON)")->required();
  run->add_option("--set", run_opts.overrides,
                  "Override a config key, e.g. --set network.loss_prob=0");
  run->add_option("--out", run_opts.out_dir, "Output directory (beats config and env)");
  CLI::Option* run_seed = run->add_option("--seed", seed_value, "Replace the scenario seed");

  CLI::App* sweep =
      app.add_subcommand("sweep", "Run one scenario per value of a swept parameter");
  std::string sweep_param;
  std::string sweep_values_csv;
  sweep->add_option("config", run_opts.config_path, "Scenario config file (JSON)")->required();
  sweep->add_option("--param", sweep_param, "Dotted config key to sweep")->required();
  sweep->add_option("--values", sweep_values_csv, "Comma-separated values")->required();
  sweep->add_option("--set", run_opts.overrides, "Additional fixed overrides");
  sweep->add_option("--out", run_opts.out_dir, "Output directory (beats config and env)");
  CLI::Option* sweep_seed = sweep->add_option("--seed", seed_value, "Replace the scenario seed");

  cli::ProbeOptions probe_opts;
  CLI::App* probe = app.add_subcommand(
      "latency-probe", "Publish CAMs to a live MQTT broker and measure loop latency");
  probe->add_option("--broker", probe_opts.broker_uri, "Broker URI, e.g. tcp://host:1883")
      ->required();
  probe->add_option("--id", probe_opts.station_id, "Station id for the CAM topic");
  probe->add_option("--count", probe_opts.count, "Number of messages to publish");
  probe->add_option("--rate", probe_opts.rate_hz, "Publish rate [Hz]");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (run_seed->count() > 0) run_opts.seed = seed_value;
      return cmd_run(run_opts);
    }
    if (sweep->parsed()) {
      if (sweep_seed->count() > 0) run_opts.seed = seed_value;
      std::vector<std::string> values;
      std::size_t start = 0;
      while (start <= sweep_values_csv.size()) {
        const auto comma = sweep_values_csv.find(',', start);
        const std::string v = sweep_values_csv.substr(
            start, comma == std::string::npos ? comma : comma - start);
        if (!v.empty()) values.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      return cmd_sweep(run_opts, sweep_param, values);
    }
    if (probe->parsed()) {
      cli::run_latency_probe(probe_opts, std::cout);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
