#pragma once

#include "thrustwalk/types.hpp"

namespace thrustwalk {

struct LinkLengths {
  double hip_roll_offset = 0.0;  // lateral offset from the abduction axis to the thigh plane
  double thigh = 0.17;
  double shank = 0.17;
};

struct JointLimits {
  Vector3d lower{-0.8, -3.0, -2.7};
  Vector3d upper{0.8, 3.0, 0.0};
};

/// Rigid-body and leg geometry of the robot. All quantities SI, body frame.
struct RobotParams {
  double mass = 6.625;  // 10.6 kg of thrust at a 1.6 thrust-to-weight ratio
  Matrix3d inertia_body = Eigen::Vector3d(0.05, 0.10, 0.12).asDiagonal();
  PerLeg<Vector3d> hip_offsets{Vector3d(0.15, 0.10, 0.0), Vector3d(0.15, -0.10, 0.0),
                               Vector3d(-0.15, 0.10, 0.0), Vector3d(-0.15, -0.10, 0.0)};
  LinkLengths link_lengths;
  double thruster_knee_offset = 0.0;  // outboard offset of the propeller from the knee axis
  // Inboard-pointing lateral thrust: left legs push -y, right legs push +y.
  PerLeg<Vector3d> thrust_dirs{Vector3d(0, -1, 0), Vector3d(0, 1, 0), Vector3d(0, -1, 0),
                               Vector3d(0, 1, 0)};
  double u_t_max = 26.0;
  double mu_s = 0.5;
  double g = 9.81;
  JointLimits joint_limits;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
  double leg_reach() const { return link_lengths.thigh + link_lengths.shank; }
};

/// Joint angles of one leg: hip abduction, hip swing, knee.
using LegJointAngles = Vector3d;

struct LegPoints {
  Vector3d foot;  // body frame, relative to COM
  Vector3d knee;  // body frame, relative to COM; thruster mount point
};

LegPoints leg_forward_kinematics(const RobotParams& params, int leg, const LegJointAngles& q);

/// Analytic d(foot)/dq in the body frame.
Matrix3d leg_jacobian(const RobotParams& params, int leg, const LegJointAngles& q);

/// Knee point shifted outboard by thruster_knee_offset.
Vector3d thruster_position(const RobotParams& params, int leg, const LegJointAngles& q);

struct IkOptions {
  double damping = 1e-3;
  double max_step = 0.3;     // rad per iteration, per joint
  double tolerance = 1e-4;   // accepted foot position error, m
  double stop_residual = 1e-9;
  int max_iterations = 100;
  double knee_seed = -0.3;   // bend applied when starting from a straight knee
};

struct IkResult {
  LegJointAngles q;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Damped least squares from q_init; never throws. q stays inside the joint limits. When the
/// iteration stalls it restarts from closed-form guesses, and iterations counts every attempt.
IkResult solve_leg_ik(const RobotParams& params, int leg, const Vector3d& target_foot,
                      const LegJointAngles& q_init, const IkOptions& options = {});

/// As solve_leg_ik, but throws NoConvergence when the residual exceeds the tolerance.
LegJointAngles leg_inverse_kinematics(const RobotParams& params, int leg,
                                      const Vector3d& target_foot, const LegJointAngles& q_init,
                                      const IkOptions& options = {});

/// tau = J^T u_g
inline Vector3d stance_torques(const Matrix3d& jacobian, const Vector3d& u_g) {
  return jacobian.transpose() * u_g;
}

struct JointGains {
  Vector3d kp = Vector3d::Zero();
  Vector3d kd = Vector3d::Zero();
};

/// PD tracking plus feedforward, per joint.
Vector3d joint_command(const Vector3d& q_desired, const Vector3d& q, const Vector3d& qd_desired,
                       const Vector3d& qd, const Vector3d& tau_ff, const JointGains& gains);

}  // namespace thrustwalk
