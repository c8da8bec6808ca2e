#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "thrustwalk/simulator.hpp"

namespace thrustwalk {

inline constexpr int kSummarySchemaVersion = 1;
inline constexpr double kThrustSoftLimit = 7.0;    // N, reported only
inline constexpr double kRecoveryRollBound = 0.05;  // rad
inline constexpr double kRecoveryHold = 0.5;        // s

/// CSV column names in file order (49 columns).
const std::vector<std::string>& log_columns();

/// Header plus one row per log entry, every value printed with 9 significant digits.
void write_log_csv(const SimLog& log, std::ostream& out);

/// Numeric contents of a log CSV. Throws IoError on a malformed file.
struct LogTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;
};

LogTable parse_log_csv(std::istream& in);

struct RunSummary {
  int schema_version = kSummarySchemaVersion;
  std::string scenario;
  std::string outcome = "Success";  // Success | Failure | SolverFailure
  std::optional<FailureEvent> failure;
  std::string message;
  double duration_logged = 0.0;
  double max_abs_roll = 0.0;
  double max_abs_lateral_deviation = 0.0;  // from the first logged y
  PerLeg<double> peak_thrust{};
  PerLeg<double> peak_friction_ratio{};
  std::optional<double> disturbance_end;
  std::optional<double> recovery_time;  // seconds after disturbance_end
  bool recovered = false;
  double mean_forward_speed = 0.0;
  bool thrust_soft_limit_exceeded = false;
};

/// Metrics over the logged (CSV-rounded) values, so a reader of log.csv reproduces them exactly.
RunSummary summarize(const LogTable& table, const RunOutcome& outcome, const Scenario& scenario);

/// First time at or after disturbance_end from which |roll| stays below the bound for the hold
/// window, as an offset from disturbance_end.
std::optional<double> recovery_time(const std::vector<double>& t, const std::vector<double>& roll,
                                    double disturbance_end, double bound = kRecoveryRollBound,
                                    double hold = kRecoveryHold);

nlohmann::json to_json(const RunSummary& s);
/// Throws IoError on missing or ill-typed fields.
RunSummary summary_from_json(const nlohmann::json& j);

struct SummaryComparison {
  nlohmann::json json;
  std::string text;
};

/// Per-metric deltas (b - a). Throws IoError when schema versions differ.
SummaryComparison compare_summaries(const RunSummary& a, const RunSummary& b,
                                    const std::string& label_a = "a",
                                    const std::string& label_b = "b");

}  // namespace thrustwalk
