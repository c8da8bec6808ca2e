#pragma once

#include <optional>
#include <span>
#include <vector>

#include "thrustwalk/centroidal_dynamics.hpp"
#include "thrustwalk/qp_solver.hpp"
#include "thrustwalk/robot_model.hpp"

namespace thrustwalk {

struct MpcConfig {
  int horizon = 5;
  double dt = 0.03;        // prediction step
  double rate_hz = 100.0;  // how often the plant loop re-solves
  StateVector q_diag = (StateVector() << 400, 400, 100, 100, 400, 800, 1, 1, 1, 10, 40, 20, 0)
                           .finished();
  InputVector r_diag = (InputVector() << Eigen::VectorXd::Constant(12, 1e-4),
                        Eigen::VectorXd::Constant(4, 1e-3))
                           .finished();
  double mu = 0.5;
  double u_t_max = 20.0;
  bool thrusters_enabled = true;
  // Use mu / sqrt(2) in the pyramid rows so every feasible force lies inside the true cone.
  bool inscribed_pyramid = true;

  double pyramid_coefficient() const;
  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

struct MpcCommand {
  Vector3d v_desired = Vector3d::Zero();
  double yaw_rate = 0.0;
  double height = 0.25;                  // absolute COM height target, world z
  std::optional<double> lateral_anchor;  // when set, the y reference is held on this line
};

struct ReferenceTrajectory {
  std::vector<StateVector> x_r;  // x_1 ... x_n
};

/// Contact flags for each prediction step.
using ContactSchedule = std::vector<ContactFlags>;

/// COM-relative lever arms used for every step of the horizon.
struct KinematicsSnapshot {
  LeverArms d;  // feet
  LeverArms r;  // thrusters
};

ReferenceTrajectory build_reference(const RobotState& state, const MpcCommand& command,
                                    const MpcConfig& config);

/// Number of inequality rows emitted for one prediction step.
int constraint_rows_per_step(const ContactFlags& stance);

/// Dense QP over U = [u_0; ...; u_{n-1}]. Swing-leg GRFs are pinned to zero by opposing rows,
/// stance legs get unilateral and friction-pyramid rows, thrusters get [0, u_t_max] bounds.
QpProblem assemble_qp(const RobotState& state, const ContactSchedule& schedule,
                      std::span<const LinearModel> models, const ReferenceTrajectory& ref,
                      const MpcConfig& config);

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, long step_index)
      : Error(what), step_index_(step_index) {}
  long step_index() const { return step_index_; }

 private:
  long step_index_;
};

struct MpcResult {
  ControlInput u;
  InputVector first_input = InputVector::Zero();
  int qp_iterations = 0;
  double objective = 0.0;
};

/// One receding-horizon solve with models frozen at the current attitude and lever arms.
MpcResult mpc_step(const RobotState& state, const ContactSchedule& schedule,
                   const KinematicsSnapshot& kin, const ReferenceTrajectory& ref,
                   const MpcConfig& config, const RobotParams& params, long step_index = 0);

/// Single-owner wrapper that counts solves and reports failures with the solve index.
class MpcController {
 public:
  MpcController(MpcConfig config, RobotParams params);

  MpcResult step(const RobotState& state, const ContactSchedule& schedule,
                 const KinematicsSnapshot& kin, const MpcCommand& command);

  const MpcConfig& config() const { return config_; }
  long solves() const { return solves_; }

 private:
  MpcConfig config_;
  RobotParams params_;
  long solves_ = 0;
};

}  // namespace thrustwalk
