#include "thrustwalk/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "thrustwalk/config.hpp"
#include "thrustwalk/errors.hpp"
#include "thrustwalk/simulator.hpp"
#include "thrustwalk/svg_plot.hpp"

namespace thrustwalk {

namespace fs = std::filesystem;

RunSummary run_to_directory(const ScenarioConfig& cfg, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "plots", ec);
  if (ec) throw IoError("cannot create " + (dir / "plots").string() + ": " + ec.message());

  const RunResult result = run(cfg.scenario, cfg.robot, cfg.mpc, cfg.gait);

  const fs::path csv = dir / "log.csv";
  {
    std::ofstream f(csv);
    if (!f) throw IoError("cannot write " + csv.string());
    write_log_csv(result.log, f);
    if (!f) throw IoError("write failed for " + csv.string());
  }
  std::ifstream back(csv);
  if (!back) throw IoError("cannot reopen " + csv.string());
  const LogTable table = parse_log_csv(back);

  RunSummary summary = summarize(table, result.outcome, cfg.scenario);
  const fs::path js = dir / "summary.json";
  {
    std::ofstream f(js);
    if (!f) throw IoError("cannot write " + js.string());
    f << to_json(summary).dump(2) << "\n";
  }
  write_standard_plots(table, cfg.mpc.mu, dir / "plots");
  return summary;
}

namespace {

RunSummary read_summary(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return summary_from_json(j);
}

std::string describe(const RunSummary& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s: %s  max|roll| %.4f rad  peak thrust %.3f N", s.scenario.c_str(),
                s.outcome.c_str(), s.max_abs_roll,
                std::max({s.peak_thrust[0], s.peak_thrust[1], s.peak_thrust[2], s.peak_thrust[3]}));
  std::string line = buf;
  if (s.failure) {
    std::snprintf(buf, sizeof buf, "  [%s at t=%.3f s: %s]", to_string(s.failure->kind), s.failure->t,
                  s.failure->detail.c_str());
    line += buf;
  }
  if (s.recovery_time) {
    std::snprintf(buf, sizeof buf, "  recovered %.3f s after disturbance", *s.recovery_time);
    line += buf;
  }
  return line;
}

struct RunJob {
  ScenarioConfig cfg;
  fs::path dir;
  std::optional<RunSummary> summary;
  std::string error;
};

int do_run(const std::vector<std::string>& configs, std::optional<std::string> out_flag,
           std::optional<std::uint64_t> seed, bool no_thrusters, bool sweep, std::ostream& out,
           std::ostream& err) {
  fs::path out_root = "out";
  if (out_flag) {
    out_root = *out_flag;
  } else if (const char* env = std::getenv("HUSKY_OUT_DIR"); env && *env) {
    out_root = env;
  }

  std::vector<RunJob> jobs;
  try {
    for (const auto& path : configs) {
      RunJob job;
      job.cfg = load_scenario_config(path);
      if (seed) job.cfg.scenario.seed = *seed;
      if (no_thrusters) job.cfg.scenario.thrusters_enabled = false;
      jobs.push_back(std::move(job));
    }
  } catch (const ConfigInvalid& e) {
    err << "error: ConfigInvalid: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  for (auto& job : jobs)
    job.dir = jobs.size() == 1 ? out_root : out_root / job.cfg.scenario.name;
  for (std::size_t i = 0; i < jobs.size(); ++i)
    for (std::size_t k = 0; k < i; ++k)
      if (jobs[i].dir == jobs[k].dir) {
        err << "error: scenarios " << k << " and " << i << " share the output directory "
            << jobs[i].dir.string() << "\n";
        return kExitError;
      }

  const int n = static_cast<int>(jobs.size());
  auto execute = [&](int i) {
    try {
      jobs[i].summary = run_to_directory(jobs[i].cfg, jobs[i].dir);
    } catch (const std::exception& e) {
      jobs[i].error = e.what();
    }
  };
  if (sweep) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) execute(i);
  } else {
    for (int i = 0; i < n; ++i) execute(i);
  }

  int code = kExitSuccess;
  for (const auto& job : jobs) {
    if (!job.summary) {
      err << "error: " << job.error << "\n";
      code = kExitError;
      continue;
    }
    out << describe(*job.summary) << "\n  -> " << job.dir.string() << "\n";
    if (job.summary->outcome != "Success" && code == kExitSuccess) code = kExitFailure;
  }
  return code;
}

int do_compare(const std::string& a, const std::string& b, std::optional<std::string> json_out,
               std::ostream& out, std::ostream& err) {
  try {
    const SummaryComparison cmp = compare_summaries(read_summary(a), read_summary(b), a, b);
    out << cmp.text;
    if (json_out) {
      std::ofstream f(*json_out);
      if (!f) throw IoError("cannot write " + *json_out);
      f << cmp.json.dump(2) << "\n";
    } else {
      out << cmp.json.dump(2) << "\n";
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitSuccess;
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thruster-assisted quadruped simulator"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Simulate one or more scenario files");
  std::vector<std::string> configs;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool no_thrusters = false;
  bool sweep = false;
  run_cmd->add_option("configs", configs, "Scenario JSON files")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (overrides HUSKY_OUT_DIR)");
  run_cmd->add_option("--seed", seed, "Override the scenario seed");
  run_cmd->add_flag("--no-thrusters", no_thrusters, "Disable thrusters");
  run_cmd->add_flag("--sweep", sweep, "Run scenarios in parallel");

  auto* cmp_cmd = app.add_subcommand("compare", "Diff two summary.json files");
  std::string a, b;
  std::optional<std::string> json_out;
  cmp_cmd->add_option("a", a)->required();
  cmp_cmd->add_option("b", b)->required();
  cmp_cmd->add_option("--json", json_out, "Write the JSON diff here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitError;
  }

  if (*run_cmd) return do_run(configs, out_dir, seed, no_thrusters, sweep, out, err);
  return do_compare(a, b, json_out, out, err);
}

}  // namespace thrustwalk
