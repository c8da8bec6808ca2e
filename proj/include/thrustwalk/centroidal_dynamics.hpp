#pragma once

#include "thrustwalk/robot_model.hpp"
#include "thrustwalk/types.hpp"

namespace thrustwalk {

/// Single-rigid-body state. omega is the body angular velocity expressed in the world frame.
struct RobotState {
  Vector3d theta = Vector3d::Zero();  // roll, pitch, yaw (ZYX)
  Vector3d p = Vector3d::Zero();
  Vector3d omega = Vector3d::Zero();
  Vector3d pdot = Vector3d::Zero();

  /// Stacks into the gravity-augmented 13-vector (last entry 1).
  StateVector to_vector() const;
  static RobotState from_vector(const StateVector& x);
};

/// World-frame ground reaction forces and scalar thrust magnitudes.
struct ControlInput {
  PerLeg<Vector3d> u_g{Vector3d::Zero(), Vector3d::Zero(), Vector3d::Zero(), Vector3d::Zero()};
  PerLeg<double> u_t{0.0, 0.0, 0.0, 0.0};

  InputVector to_vector() const;
  static ControlInput from_vector(const InputVector& u);
};

/// A continuous (A, B) pair or a discrete (A_k, B_k) pair over the augmented state.
struct LinearModel {
  StateMatrix A = StateMatrix::Zero();
  InputMatrix B = InputMatrix::Zero();
};

struct Accelerations {
  Vector3d pddot;
  Vector3d omegadot;
};

/// COM-relative lever arms, world frame.
using LeverArms = PerLeg<Vector3d>;

Matrix3d skew(const Vector3d& v);
Matrix3d yaw_rotation(double yaw);
/// Body-to-world rotation R = Rz(yaw) Ry(pitch) Rx(roll).
Matrix3d rotation_from_euler(const Vector3d& theta);

enum class ThrustFrame {
  kFullRotation,  // thrust directions rotated by the full body attitude
  kYawOnly,       // rotated by Rz only, as in the prediction model
};

/// Centroidal accelerations with the yaw-rotated inertia approximation (no gyroscopic term).
Accelerations centroidal_accel(const RobotState& state, const ControlInput& u, const LeverArms& d,
                               const LeverArms& r, const RobotParams& params,
                               ThrustFrame thrust_frame = ThrustFrame::kFullRotation);

enum class EulerRateMode { kExact, kYawApproximation };

/// Maps world-frame omega to ZYX Euler angle rates. Exact mode throws GimbalLock when
/// |cos(pitch)| <= 1e-6.
Vector3d euler_rates(const Vector3d& theta, const Vector3d& omega, EulerRateMode mode);

/// Continuous linear model x_dot = A x + B u over the augmented state. Gravity sits in the
/// column of the constant state. Every leg keeps its GRF columns; the MPC pins swing legs.
LinearModel build_continuous_model(const RobotState& state, const LeverArms& d,
                                   const LeverArms& r, const RobotParams& params);

/// Forward Euler: A_k = I + A dt, B_k = B dt.
LinearModel discretize(const LinearModel& continuous, double dt);

}  // namespace thrustwalk
