#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "thrustwalk/gait_planner.hpp"
#include "thrustwalk/mpc_controller.hpp"
#include "thrustwalk/robot_model.hpp"
#include "thrustwalk/simulator.hpp"

namespace thrustwalk {

inline constexpr int kConfigSchemaVersion = 1;

/// Everything one scenario document describes.
struct ScenarioConfig {
  Scenario scenario;
  RobotParams robot;
  MpcConfig mpc;
  GaitConfig gait;
};

/// Missing optional blocks keep their defaults. Throws ConfigInvalid with the JSON path of the
/// offending field.
ScenarioConfig parse_scenario_config(const nlohmann::json& doc);

/// Throws ConfigInvalid when the file is missing or does not parse.
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

/// Reads a RobotParams object. Field names follow the struct; unknown fields are rejected.
RobotParams robot_params_from_json(const nlohmann::json& obj, const std::string& path = "robot");

nlohmann::json robot_params_to_json(const RobotParams& params);

}  // namespace thrustwalk
