#include "thrustwalk/centroidal_dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "thrustwalk/errors.hpp"

namespace thrustwalk {

StateVector RobotState::to_vector() const {
  StateVector x;
  x << theta, p, omega, pdot, 1.0;
  return x;
}

RobotState RobotState::from_vector(const StateVector& x) {
  RobotState s;
  s.theta = x.segment<3>(0);
  s.p = x.segment<3>(3);
  s.omega = x.segment<3>(6);
  s.pdot = x.segment<3>(9);
  return s;
}

InputVector ControlInput::to_vector() const {
  InputVector u;
  for (int i = 0; i < kNumLegs; ++i) {
    u.segment<3>(3 * i) = u_g[i];
    u[12 + i] = u_t[i];
  }
  return u;
}

ControlInput ControlInput::from_vector(const InputVector& u) {
  ControlInput c;
  for (int i = 0; i < kNumLegs; ++i) {
    c.u_g[i] = u.segment<3>(3 * i);
    c.u_t[i] = u[12 + i];
  }
  return c;
}

Matrix3d skew(const Vector3d& v) {
  Matrix3d m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Matrix3d yaw_rotation(double yaw) {
  return Eigen::AngleAxisd(yaw, Vector3d::UnitZ()).toRotationMatrix();
}

Matrix3d rotation_from_euler(const Vector3d& theta) {
  return (Eigen::AngleAxisd(theta.z(), Vector3d::UnitZ()) *
          Eigen::AngleAxisd(theta.y(), Vector3d::UnitY()) *
          Eigen::AngleAxisd(theta.x(), Vector3d::UnitX()))
      .toRotationMatrix();
}

Accelerations centroidal_accel(const RobotState& state, const ControlInput& u, const LeverArms& d,
                               const LeverArms& r, const RobotParams& params,
                               ThrustFrame thrust_frame) {
  const Matrix3d rz = yaw_rotation(state.theta.z());
  const Matrix3d r_thrust =
      thrust_frame == ThrustFrame::kFullRotation ? rotation_from_euler(state.theta) : rz;
  const Matrix3d inertia_world = rz * params.inertia_body * rz.transpose();

  Vector3d force = Vector3d::Zero();
  Vector3d torque = Vector3d::Zero();
  for (int i = 0; i < kNumLegs; ++i) {
    const Vector3d thrust = r_thrust * params.thrust_dirs[i] * u.u_t[i];
    force += thrust + u.u_g[i];
    torque += r[i].cross(thrust) + d[i].cross(u.u_g[i]);
  }
  Accelerations a;
  a.pddot = force / params.mass - Vector3d(0.0, 0.0, params.g);
  a.omegadot = inertia_world.llt().solve(torque);
  return a;
}

Vector3d euler_rates(const Vector3d& theta, const Vector3d& omega, EulerRateMode mode) {
  const double cy = std::cos(theta.z());
  const double sy = std::sin(theta.z());
  if (mode == EulerRateMode::kYawApproximation) {
    return yaw_rotation(theta.z()).transpose() * omega;
  }
  const double cp = std::cos(theta.y());
  const double sp = std::sin(theta.y());
  if (std::abs(cp) <= 1e-6) {
    throw GimbalLock("Euler rate map is singular at pitch = " + std::to_string(theta.y()));
  }
  Matrix3d m;
  m << cy / cp, sy / cp, 0.0,
       -sy, cy, 0.0,
       cy * sp / cp, sy * sp / cp, 1.0;
  return m * omega;
}

LinearModel build_continuous_model(const RobotState& state, const LeverArms& d,
                                   const LeverArms& r, const RobotParams& params) {
  const Matrix3d rz = yaw_rotation(state.theta.z());
  const Matrix3d inv_inertia_world = (rz * params.inertia_body * rz.transpose()).inverse();

  LinearModel m;
  m.A.block<3, 3>(0, 6) = rz.transpose();
  m.A.block<3, 3>(3, 9) = Matrix3d::Identity();
  m.A(11, 12) = -params.g;

  for (int i = 0; i < kNumLegs; ++i) {
    m.B.block<3, 3>(6, 3 * i) = inv_inertia_world * skew(d[i]);
    m.B.block<3, 3>(9, 3 * i) = Matrix3d::Identity() / params.mass;
    const Vector3d e_world = rz * params.thrust_dirs[i];
    m.B.block<3, 1>(6, 12 + i) = inv_inertia_world * r[i].cross(e_world);
    m.B.block<3, 1>(9, 12 + i) = e_world / params.mass;
  }
  return m;
}

LinearModel discretize(const LinearModel& continuous, double dt) {
  if (dt < 0.0) throw std::invalid_argument("discretize: dt must be non-negative");
  LinearModel m;
  m.A = StateMatrix::Identity() + continuous.A * dt;
  m.B = continuous.B * dt;
  return m;
}

}  // namespace thrustwalk
