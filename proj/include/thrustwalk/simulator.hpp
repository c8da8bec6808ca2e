#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thrustwalk/centroidal_dynamics.hpp"
#include "thrustwalk/gait_planner.hpp"
#include "thrustwalk/mpc_controller.hpp"
#include "thrustwalk/robot_model.hpp"

namespace thrustwalk {

struct Terrain {
  enum class Kind { kFlat, kBeam };
  Kind kind = Kind::kFlat;
  double width = 0.1;       // beam only
  double height = 0.1;      // beam top above the ground
  double centerline = 0.0;  // beam runs along world x at this y

  double surface_height() const { return kind == Kind::kBeam ? height : 0.0; }
  /// True when a foot at this xy rests on the support surface.
  bool supports(const Vector3d& foot) const;
};

struct Disturbance {
  double t_start = 0.0;
  double t_end = 0.0;
  Vector3d force = Vector3d::Zero();  // world frame, applied at the COM
};

struct Scenario {
  std::string name = "scenario";
  Terrain terrain;
  std::vector<Disturbance> disturbances;
  double duration = 1.0;
  Vector3d v_desired = Vector3d::Zero();
  double yaw_rate = 0.0;
  double height = 0.25;  // COM height above the support surface
  bool thrusters_enabled = true;
  double sim_dt = 1e-3;
  std::uint64_t seed = 0;
  double mu_real = 0.5;
  double initial_perturbation = 0.0;  // std dev of a seeded initial lateral velocity kick, m/s

  void validate() const;
  Vector3d external_force(double t) const;
};

enum class FailureKind { kSlip, kBeamMiss, kRollDivergence, kHeightCollapse };

const char* to_string(FailureKind kind);

struct FailureEvent {
  FailureKind kind;
  double t = 0.0;
  std::string detail;
};

struct FailureThresholds {
  double max_tilt = 0.6;              // rad, roll or pitch
  double min_height_fraction = 0.6;   // of the commanded height
  double force_tolerance = 1e-6;      // N, slack on the friction and unilateral checks
  double unloaded_threshold = 1e-6;   // N, below this a stance foot reports friction ratio 0
};

struct LogRow {
  double t = 0.0;
  RobotState state;
  ControlInput u;
  PerLeg<Vector3d> feet;
  ContactFlags stance{};
  PerLeg<double> friction_ratio{};
  LeverArms d;  // lever arms the plant step used; not written to CSV
  LeverArms r;
};

struct SimLog {
  std::vector<LogRow> rows;
  std::vector<std::pair<double, std::string>> events;
};

struct RunOutcome {
  enum class Kind { kSuccess, kFailure, kSolverFailure };
  Kind kind = Kind::kSuccess;
  std::optional<FailureEvent> failure;
  std::string message;

  bool success() const { return kind == Kind::kSuccess; }
};

struct RunResult {
  SimLog log;
  RunOutcome outcome;
};

/// Plant accelerations: full attitude, world inertia R I R', gyroscopic term, external force.
Accelerations plant_accel(const RobotState& state, const ControlInput& u, const LeverArms& d,
                          const LeverArms& r, const Vector3d& f_ext, const RobotParams& params);

/// Semi-implicit Euler step of the nonlinear plant; angles advance with the exact Euler-rate
/// map evaluated at the new angular velocity. Throws GimbalLock near |pitch| = pi/2.
RobotState step(const RobotState& state, const ControlInput& u, const LeverArms& d,
                const LeverArms& r, const Vector3d& f_ext, const RobotParams& params, double dt);

struct ContactViolation {
  FailureKind kind;
  int leg;
  std::string detail;
};

/// |u_xy| / u_z for a loaded foot, 0 when u_z is below the unloaded threshold.
double friction_ratio(const Vector3d& u_g, double unloaded_threshold = 1e-6);

std::vector<ContactViolation> check_contact_legality(const ControlInput& u,
                                                     const ContactFlags& stance,
                                                     const PerLeg<Vector3d>& feet,
                                                     const Terrain& terrain, double mu_real,
                                                     double force_tolerance = 1e-6);

struct SimOptions {
  FailureThresholds thresholds;
  IkOptions ik;
};

/// Full closed loop: plant at sim_dt, MPC at rate_hz, trot planner, kinematic swing feet.
/// Never throws on simulated failures; they are reported in the outcome.
RunResult run(const Scenario& scenario, const RobotParams& params, const MpcConfig& mpc,
              const GaitConfig& gait, const SimOptions& options = {});

}  // namespace thrustwalk
