#include "thrustwalk/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "thrustwalk/errors.hpp"

namespace thrustwalk {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  throw ConfigInvalid(path + ": " + msg);
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) invalid(path, "expected an object");
}

void reject_unknown(const json& obj, const std::string& path, std::set<std::string> known) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) invalid(path + "." + key, "unknown field");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) invalid(path, "expected a number");
  return j.get<double>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) invalid(path, "expected true or false");
  return j.get<bool>();
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != N) invalid(path, "expected an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

PerLeg<Vector3d> per_leg_vectors(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != kNumLegs) invalid(path, "expected 4 three-vectors");
  PerLeg<Vector3d> out;
  for (int i = 0; i < kNumLegs; ++i) out[i] = vec<3>(j[i], path + "[" + std::to_string(i) + "]");
  return out;
}

Matrix3d mat3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) invalid(path, "expected a 3x3 nested array");
  Matrix3d m;
  for (int r = 0; r < 3; ++r) m.row(r) = vec<3>(j[r], path + "[" + std::to_string(r) + "]").transpose();
  return m;
}

// Calls fn(value, path) when key is present.
template <typename Fn>
void field(const json& obj, const std::string& path, const char* key, Fn&& fn) {
  if (obj.contains(key)) fn(obj.at(key), path + "." + key);
}

MpcConfig mpc_from_json(const json& obj, const std::string& path) {
  expect_object(obj, path);
  reject_unknown(obj, path,
                 {"horizon", "dt", "rate_hz", "Q", "R", "mu", "u_t_max", "thrusters_enabled",
                  "inscribed_pyramid"});
  MpcConfig c;
  field(obj, path, "horizon", [&](const json& v, const std::string& p) {
    if (!v.is_number_integer()) invalid(p, "expected an integer");
    c.horizon = v.get<int>();
  });
  field(obj, path, "dt", [&](const json& v, const std::string& p) { c.dt = number(v, p); });
  field(obj, path, "rate_hz", [&](const json& v, const std::string& p) { c.rate_hz = number(v, p); });
  field(obj, path, "Q", [&](const json& v, const std::string& p) { c.q_diag = vec<kStateDim>(v, p); });
  field(obj, path, "R", [&](const json& v, const std::string& p) { c.r_diag = vec<kInputDim>(v, p); });
  field(obj, path, "mu", [&](const json& v, const std::string& p) { c.mu = number(v, p); });
  field(obj, path, "u_t_max", [&](const json& v, const std::string& p) { c.u_t_max = number(v, p); });
  field(obj, path, "thrusters_enabled",
        [&](const json& v, const std::string& p) { c.thrusters_enabled = boolean(v, p); });
  field(obj, path, "inscribed_pyramid",
        [&](const json& v, const std::string& p) { c.inscribed_pyramid = boolean(v, p); });
  return c;
}

GaitConfig gait_from_json(const json& obj, const std::string& path) {
  expect_object(obj, path);
  reject_unknown(obj, path,
                 {"stance_duration", "swing_duration", "offset", "raibert_gain", "apex_height",
                  "foot_margin", "stance_half_width", "reach_fraction"});
  GaitConfig g;
  auto num = [&](const char* key, double& dst) {
    field(obj, path, key, [&](const json& v, const std::string& p) { dst = number(v, p); });
  };
  num("stance_duration", g.stance_duration);
  num("swing_duration", g.swing_duration);
  num("offset", g.offset);
  num("raibert_gain", g.raibert_gain);
  num("apex_height", g.apex_height);
  num("foot_margin", g.foot_margin);
  num("reach_fraction", g.reach_fraction);
  field(obj, path, "stance_half_width",
        [&](const json& v, const std::string& p) { g.stance_half_width = number(v, p); });
  if (g.stance_half_width && *g.stance_half_width < 0.0)
    invalid(path + ".stance_half_width", "must be non-negative");
  if (!(g.reach_fraction > 0.0 && g.reach_fraction <= 1.0))
    invalid(path + ".reach_fraction", "must be in (0, 1]");
  if (!(g.stance_duration > 0.0)) invalid(path + ".stance_duration", "must be positive");
  if (!(g.swing_duration > 0.0)) invalid(path + ".swing_duration", "must be positive");
  if (!(g.apex_height > 0.0)) invalid(path + ".apex_height", "must be positive");
  return g;
}

Terrain terrain_from_json(const json& obj, const std::string& path) {
  expect_object(obj, path);
  reject_unknown(obj, path, {"type", "width", "height", "centerline"});
  Terrain t;
  if (!obj.contains("type") || !obj["type"].is_string())
    invalid(path + ".type", "expected \"flat\", \"beam\" or \"path\"");
  const std::string type = obj["type"].get<std::string>();
  if (type == "flat") {
    t.kind = Terrain::Kind::kFlat;
  } else if (type == "beam") {
    t.kind = Terrain::Kind::kBeam;
  } else if (type == "path") {
    // A strip at ground level: beam rules with zero height.
    t.kind = Terrain::Kind::kBeam;
    t.height = 0.0;
  } else {
    invalid(path + ".type", "expected \"flat\", \"beam\" or \"path\", got \"" + type + "\"");
  }
  field(obj, path, "width", [&](const json& v, const std::string& p) { t.width = number(v, p); });
  field(obj, path, "height", [&](const json& v, const std::string& p) { t.height = number(v, p); });
  field(obj, path, "centerline", [&](const json& v, const std::string& p) { t.centerline = number(v, p); });
  return t;
}

}  // namespace

RobotParams robot_params_from_json(const json& obj, const std::string& path) {
  expect_object(obj, path);
  reject_unknown(obj, path,
                 {"mass", "inertia_body", "hip_offsets", "link_lengths", "thruster_knee_offset",
                  "thrust_dirs", "u_t_max", "mu_s", "g", "joint_limits"});
  RobotParams rp;
  field(obj, path, "mass", [&](const json& v, const std::string& p) { rp.mass = number(v, p); });
  field(obj, path, "inertia_body", [&](const json& v, const std::string& p) { rp.inertia_body = mat3(v, p); });
  field(obj, path, "hip_offsets", [&](const json& v, const std::string& p) { rp.hip_offsets = per_leg_vectors(v, p); });
  field(obj, path, "link_lengths", [&](const json& v, const std::string& p) {
    expect_object(v, p);
    reject_unknown(v, p, {"hip_roll_offset", "thigh", "shank"});
    field(v, p, "hip_roll_offset", [&](const json& x, const std::string& q) { rp.link_lengths.hip_roll_offset = number(x, q); });
    field(v, p, "thigh", [&](const json& x, const std::string& q) { rp.link_lengths.thigh = number(x, q); });
    field(v, p, "shank", [&](const json& x, const std::string& q) { rp.link_lengths.shank = number(x, q); });
  });
  field(obj, path, "thruster_knee_offset",
        [&](const json& v, const std::string& p) { rp.thruster_knee_offset = number(v, p); });
  field(obj, path, "thrust_dirs", [&](const json& v, const std::string& p) { rp.thrust_dirs = per_leg_vectors(v, p); });
  field(obj, path, "u_t_max", [&](const json& v, const std::string& p) { rp.u_t_max = number(v, p); });
  field(obj, path, "mu_s", [&](const json& v, const std::string& p) { rp.mu_s = number(v, p); });
  field(obj, path, "g", [&](const json& v, const std::string& p) { rp.g = number(v, p); });
  field(obj, path, "joint_limits", [&](const json& v, const std::string& p) {
    expect_object(v, p);
    reject_unknown(v, p, {"lower", "upper"});
    field(v, p, "lower", [&](const json& x, const std::string& q) { rp.joint_limits.lower = vec<3>(x, q); });
    field(v, p, "upper", [&](const json& x, const std::string& q) { rp.joint_limits.upper = vec<3>(x, q); });
  });
  try {
    rp.validate();
  } catch (const std::invalid_argument& e) {
    invalid(path, e.what());
  }
  return rp;
}

json robot_params_to_json(const RobotParams& rp) {
  auto v3 = [](const Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); };
  json j;
  j["mass"] = rp.mass;
  j["inertia_body"] = json::array();
  for (int r = 0; r < 3; ++r) j["inertia_body"].push_back(v3(rp.inertia_body.row(r).transpose()));
  j["hip_offsets"] = json::array();
  j["thrust_dirs"] = json::array();
  for (int i = 0; i < kNumLegs; ++i) {
    j["hip_offsets"].push_back(v3(rp.hip_offsets[i]));
    j["thrust_dirs"].push_back(v3(rp.thrust_dirs[i]));
  }
  j["link_lengths"] = {{"hip_roll_offset", rp.link_lengths.hip_roll_offset},
                       {"thigh", rp.link_lengths.thigh},
                       {"shank", rp.link_lengths.shank}};
  j["thruster_knee_offset"] = rp.thruster_knee_offset;
  j["u_t_max"] = rp.u_t_max;
  j["mu_s"] = rp.mu_s;
  j["g"] = rp.g;
  j["joint_limits"] = {{"lower", v3(rp.joint_limits.lower)}, {"upper", v3(rp.joint_limits.upper)}};
  return j;
}

ScenarioConfig parse_scenario_config(const json& doc) {
  expect_object(doc, "$");
  reject_unknown(doc, "$",
                 {"schema_version", "name", "duration", "sim_dt", "seed", "terrain", "disturbances",
                  "command", "thrusters_enabled", "mu_real", "initial_perturbation", "robot", "mpc",
                  "gait"});
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    invalid("$.schema_version", "required integer");
  }
  if (doc["schema_version"].get<int>() != kConfigSchemaVersion) {
    invalid("$.schema_version", "unsupported version " + doc["schema_version"].dump() +
                                    " (expected " + std::to_string(kConfigSchemaVersion) + ")");
  }

  ScenarioConfig cfg;
  Scenario& sc = cfg.scenario;
  if (!doc.contains("duration")) invalid("$.duration", "required");
  sc.duration = number(doc["duration"], "$.duration");
  field(doc, "$", "name", [&](const json& v, const std::string& p) {
    if (!v.is_string()) invalid(p, "expected a string");
    sc.name = v.get<std::string>();
  });
  field(doc, "$", "sim_dt", [&](const json& v, const std::string& p) { sc.sim_dt = number(v, p); });
  field(doc, "$", "seed", [&](const json& v, const std::string& p) {
    if (!v.is_number_unsigned()) invalid(p, "expected a non-negative integer");
    sc.seed = v.get<std::uint64_t>();
  });
  field(doc, "$", "terrain", [&](const json& v, const std::string& p) { sc.terrain = terrain_from_json(v, p); });
  field(doc, "$", "disturbances", [&](const json& v, const std::string& p) {
    if (!v.is_array()) invalid(p, "expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string pi = p + "[" + std::to_string(i) + "]";
      expect_object(v[i], pi);
      reject_unknown(v[i], pi, {"t_start", "t_end", "force"});
      for (const char* key : {"t_start", "t_end", "force"}) {
        if (!v[i].contains(key)) invalid(pi + "." + key, "required");
      }
      Disturbance d;
      d.t_start = number(v[i]["t_start"], pi + ".t_start");
      d.t_end = number(v[i]["t_end"], pi + ".t_end");
      d.force = vec<3>(v[i]["force"], pi + ".force");
      sc.disturbances.push_back(d);
    }
  });
  field(doc, "$", "command", [&](const json& v, const std::string& p) {
    expect_object(v, p);
    reject_unknown(v, p, {"v_d", "yaw_rate", "height"});
    field(v, p, "v_d", [&](const json& x, const std::string& q) { sc.v_desired = vec<3>(x, q); });
    field(v, p, "yaw_rate", [&](const json& x, const std::string& q) { sc.yaw_rate = number(x, q); });
    field(v, p, "height", [&](const json& x, const std::string& q) { sc.height = number(x, q); });
  });
  field(doc, "$", "thrusters_enabled",
        [&](const json& v, const std::string& p) { sc.thrusters_enabled = boolean(v, p); });
  field(doc, "$", "initial_perturbation",
        [&](const json& v, const std::string& p) { sc.initial_perturbation = number(v, p); });
  field(doc, "$", "robot", [&](const json& v, const std::string& p) { cfg.robot = robot_params_from_json(v, p); });
  field(doc, "$", "mpc", [&](const json& v, const std::string& p) { cfg.mpc = mpc_from_json(v, p); });
  field(doc, "$", "gait", [&](const json& v, const std::string& p) { cfg.gait = gait_from_json(v, p); });
  // The plant friction defaults to the controller's.
  sc.mu_real = cfg.mpc.mu;
  field(doc, "$", "mu_real", [&](const json& v, const std::string& p) { sc.mu_real = number(v, p); });

  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    invalid("$", e.what());
  }
  try {
    cfg.mpc.validate();
  } catch (const std::invalid_argument& e) {
    invalid("$.mpc", e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid(path.string() + ": cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(path.string() + ": " + e.what());
  }
  try {
    return parse_scenario_config(doc);
  } catch (const ConfigInvalid& e) {
    throw ConfigInvalid(path.string() + ": " + e.what());
  }
}

}  // namespace thrustwalk
