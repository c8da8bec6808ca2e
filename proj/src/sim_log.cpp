#include "thrustwalk/sim_log.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "thrustwalk/errors.hpp"

namespace thrustwalk {

namespace {

using nlohmann::json;

std::vector<std::string> make_columns() {
  std::vector<std::string> c = {"t", "roll", "pitch", "yaw", "x", "y", "z", "wx", "wy", "wz",
                                "vx", "vy", "vz"};
  const char* axes[] = {"x", "y", "z"};
  for (int leg = 0; leg < kNumLegs; ++leg)
    for (const char* a : axes) c.push_back("grf" + std::to_string(leg) + "_" + a);
  for (int leg = 0; leg < kNumLegs; ++leg) c.push_back("thrust" + std::to_string(leg));
  for (int leg = 0; leg < kNumLegs; ++leg)
    for (const char* a : axes) c.push_back("foot" + std::to_string(leg) + "_" + a);
  for (int leg = 0; leg < kNumLegs; ++leg) c.push_back("stance" + std::to_string(leg));
  for (int leg = 0; leg < kNumLegs; ++leg) c.push_back("friction_ratio" + std::to_string(leg));
  return c;
}

void put(std::string& line, double v) {
  char buf[32];
  // Normalize negative zero so identical runs stay byte-identical across code paths.
  if (v == 0.0) v = 0.0;
  std::snprintf(buf, sizeof buf, "%.9g", v);
  if (!line.empty()) line.push_back(',');
  line += buf;
}

const char* outcome_name(RunOutcome::Kind k) {
  switch (k) {
    case RunOutcome::Kind::kSuccess: return "Success";
    case RunOutcome::Kind::kFailure: return "Failure";
    case RunOutcome::Kind::kSolverFailure: return "SolverFailure";
  }
  return "Unknown";
}

std::optional<FailureKind> failure_kind_from(const std::string& s) {
  for (FailureKind k : {FailureKind::kSlip, FailureKind::kBeamMiss, FailureKind::kRollDivergence,
                        FailureKind::kHeightCollapse}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw IoError(std::string("summary: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IoError(std::string("summary: field '") + key + "' has the wrong type");
  }
}

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number()) throw IoError(std::string("summary: field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

const std::vector<std::string>& log_columns() {
  static const std::vector<std::string> cols = make_columns();
  return cols;
}

void write_log_csv(const SimLog& log, std::ostream& out) {
  const auto& cols = log_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  std::string line;
  for (const LogRow& r : log.rows) {
    line.clear();
    put(line, r.t);
    for (const Vector3d* v : {&r.state.theta, &r.state.p, &r.state.omega, &r.state.pdot})
      for (int i = 0; i < 3; ++i) put(line, (*v)[i]);
    for (int leg = 0; leg < kNumLegs; ++leg)
      for (int i = 0; i < 3; ++i) put(line, r.u.u_g[leg][i]);
    for (int leg = 0; leg < kNumLegs; ++leg) put(line, r.u.u_t[leg]);
    for (int leg = 0; leg < kNumLegs; ++leg)
      for (int i = 0; i < 3; ++i) put(line, r.feet[leg][i]);
    for (int leg = 0; leg < kNumLegs; ++leg) put(line, r.stance[leg] ? 1.0 : 0.0);
    for (int leg = 0; leg < kNumLegs; ++leg) put(line, r.friction_ratio[leg]);
    out << line << '\n';
  }
}

int LogTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw IoError("log: no column '" + name + "'");
  return static_cast<int>(it - header.begin());
}

LogTable parse_log_csv(std::istream& in) {
  LogTable table;
  std::string line;
  if (!std::getline(in, line)) throw IoError("log: empty file");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(table.header.size());
    const char* p = line.c_str();
    while (*p) {
      char* end = nullptr;
      row.push_back(std::strtod(p, &end));
      if (end == p) throw IoError("log: bad number on line " + std::to_string(lineno));
      p = end;
      if (*p == ',') ++p;
    }
    if (row.size() != table.header.size()) {
      throw IoError("log: line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                    " fields, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::optional<double> recovery_time(const std::vector<double>& t, const std::vector<double>& roll,
                                    double disturbance_end, double bound, double hold) {
  const std::size_t n = t.size();
  if (n == 0) return std::nullopt;
  constexpr double kSlack = 1e-9;
  std::vector<double> next_bad(n);
  double nb = std::numeric_limits<double>::infinity();
  for (std::size_t k = n; k-- > 0;) {
    if (std::abs(roll[k]) >= bound) nb = t[k];
    next_bad[k] = nb;
  }
  const double t_last = t.back();
  for (std::size_t j = 0; j < n; ++j) {
    if (t[j] < disturbance_end - kSlack) continue;
    if (t[j] + hold > t_last + kSlack) break;
    if (next_bad[j] > t[j] + hold + kSlack) return t[j] - disturbance_end;
  }
  return std::nullopt;
}

RunSummary summarize(const LogTable& table, const RunOutcome& outcome, const Scenario& scenario) {
  RunSummary s;
  s.scenario = scenario.name;
  s.outcome = outcome_name(outcome.kind);
  s.failure = outcome.failure;
  s.message = outcome.message;
  for (const auto& d : scenario.disturbances) {
    s.disturbance_end = std::max(s.disturbance_end.value_or(d.t_end), d.t_end);
  }

  const int c_t = table.column("t");
  const int c_roll = table.column("roll");
  const int c_x = table.column("x");
  const int c_y = table.column("y");
  const int c_thrust = table.column("thrust0");
  const int c_ratio = table.column("friction_ratio0");

  std::vector<double> t;
  std::vector<double> roll;
  t.reserve(table.rows.size());
  roll.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    t.push_back(row[c_t]);
    roll.push_back(row[c_roll]);
    s.max_abs_roll = std::max(s.max_abs_roll, std::abs(row[c_roll]));
    s.max_abs_lateral_deviation =
        std::max(s.max_abs_lateral_deviation, std::abs(row[c_y] - table.rows.front()[c_y]));
    for (int leg = 0; leg < kNumLegs; ++leg) {
      s.peak_thrust[leg] = std::max(s.peak_thrust[leg], row[c_thrust + leg]);
      s.peak_friction_ratio[leg] = std::max(s.peak_friction_ratio[leg], row[c_ratio + leg]);
    }
  }
  if (!t.empty()) s.duration_logged = t.back() - t.front();
  if (t.size() >= 2) {
    s.mean_forward_speed = (table.rows.back()[c_x] - table.rows.front()[c_x]) / (t.back() - t.front());
  }
  s.thrust_soft_limit_exceeded =
      *std::max_element(s.peak_thrust.begin(), s.peak_thrust.end()) > kThrustSoftLimit;

  const bool ok = outcome.kind == RunOutcome::Kind::kSuccess;
  if (s.disturbance_end) {
    if (ok) s.recovery_time = recovery_time(t, roll, *s.disturbance_end);
    s.recovered = ok && s.recovery_time.has_value();
  } else {
    s.recovered = ok;
  }
  return s;
}

json to_json(const RunSummary& s) {
  json j;
  j["schema_version"] = s.schema_version;
  j["scenario"] = s.scenario;
  j["outcome"] = s.outcome;
  if (s.failure) {
    j["failure"] = {{"kind", to_string(s.failure->kind)}, {"t", s.failure->t}, {"detail", s.failure->detail}};
  } else {
    j["failure"] = nullptr;
  }
  j["message"] = s.message;
  j["duration_logged"] = s.duration_logged;
  j["max_abs_roll"] = s.max_abs_roll;
  j["max_abs_lateral_deviation"] = s.max_abs_lateral_deviation;
  j["peak_thrust"] = s.peak_thrust;
  j["peak_friction_ratio"] = s.peak_friction_ratio;
  j["disturbance_end"] = s.disturbance_end ? json(*s.disturbance_end) : json(nullptr);
  j["recovery_time"] = s.recovery_time ? json(*s.recovery_time) : json(nullptr);
  j["recovered"] = s.recovered;
  j["mean_forward_speed"] = s.mean_forward_speed;
  j["thrust_soft_limit"] = kThrustSoftLimit;
  j["thrust_soft_limit_exceeded"] = s.thrust_soft_limit_exceeded;
  return j;
}

RunSummary summary_from_json(const json& j) {
  if (!j.is_object()) throw IoError("summary: expected a JSON object");
  RunSummary s;
  s.schema_version = require<int>(j, "schema_version");
  s.scenario = require<std::string>(j, "scenario");
  s.outcome = require<std::string>(j, "outcome");
  if (j.contains("failure") && !j["failure"].is_null()) {
    const json& f = j["failure"];
    const auto kind = failure_kind_from(require<std::string>(f, "kind"));
    if (!kind) throw IoError("summary: unknown failure kind");
    s.failure = FailureEvent{*kind, require<double>(f, "t"), require<std::string>(f, "detail")};
  }
  if (j.contains("message")) s.message = require<std::string>(j, "message");
  s.duration_logged = require<double>(j, "duration_logged");
  s.max_abs_roll = require<double>(j, "max_abs_roll");
  s.max_abs_lateral_deviation = require<double>(j, "max_abs_lateral_deviation");
  s.peak_thrust = require<PerLeg<double>>(j, "peak_thrust");
  s.peak_friction_ratio = require<PerLeg<double>>(j, "peak_friction_ratio");
  s.disturbance_end = optional_number(j, "disturbance_end");
  s.recovery_time = optional_number(j, "recovery_time");
  s.recovered = require<bool>(j, "recovered");
  s.mean_forward_speed = require<double>(j, "mean_forward_speed");
  s.thrust_soft_limit_exceeded = require<bool>(j, "thrust_soft_limit_exceeded");
  return s;
}

SummaryComparison compare_summaries(const RunSummary& a, const RunSummary& b,
                                    const std::string& label_a, const std::string& label_b) {
  if (a.schema_version != b.schema_version) {
    throw IoError("summary schema mismatch: " + label_a + " has version " +
                  std::to_string(a.schema_version) + ", " + label_b + " has version " +
                  std::to_string(b.schema_version));
  }
  SummaryComparison c;
  std::ostringstream text;
  json deltas;
  char buf[160];

  auto scalar = [&](const char* name, double va, double vb) {
    deltas[name] = vb - va;
    std::snprintf(buf, sizeof buf, "  %-28s %12.6g %12.6g %+12.6g\n", name, va, vb, vb - va);
    text << buf;
  };
  auto per_leg = [&](const char* name, const PerLeg<double>& va, const PerLeg<double>& vb) {
    json arr = json::array();
    for (int i = 0; i < kNumLegs; ++i) {
      arr.push_back(vb[i] - va[i]);
      const std::string label = std::string(name) + "[" + std::to_string(i) + "]";
      std::snprintf(buf, sizeof buf, "  %-28s %12.6g %12.6g %+12.6g\n", label.c_str(), va[i], vb[i],
                    vb[i] - va[i]);
      text << buf;
    }
    deltas[name] = arr;
  };

  std::snprintf(buf, sizeof buf, "  %-28s %12s %12s %12s\n", "metric", label_a.c_str(),
                label_b.c_str(), "delta");
  text << buf;
  scalar("max_abs_roll", a.max_abs_roll, b.max_abs_roll);
  scalar("max_abs_lateral_deviation", a.max_abs_lateral_deviation, b.max_abs_lateral_deviation);
  scalar("mean_forward_speed", a.mean_forward_speed, b.mean_forward_speed);
  scalar("duration_logged", a.duration_logged, b.duration_logged);
  per_leg("peak_thrust", a.peak_thrust, b.peak_thrust);
  per_leg("peak_friction_ratio", a.peak_friction_ratio, b.peak_friction_ratio);
  if (a.recovery_time && b.recovery_time) {
    scalar("recovery_time", *a.recovery_time, *b.recovery_time);
  } else {
    deltas["recovery_time"] = nullptr;
  }
  text << "  outcome: " << label_a << " = " << a.outcome << ", " << label_b << " = " << b.outcome
       << "\n  recovered: " << label_a << " = " << (a.recovered ? "yes" : "no") << ", " << label_b
       << " = " << (b.recovered ? "yes" : "no") << "\n";

  c.json = {{"schema_version", a.schema_version},
            {"a", label_a},
            {"b", label_b},
            {"deltas", deltas},
            {"outcome", {{"a", a.outcome}, {"b", b.outcome}}},
            {"recovered", {{"a", a.recovered}, {"b", b.recovered}}}};
  c.text = text.str();
  return c;
}

}  // namespace thrustwalk
