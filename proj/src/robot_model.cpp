#include "thrustwalk/robot_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "thrustwalk/errors.hpp"

namespace thrustwalk {

namespace {

Matrix3d rot_x(double a) {
  return Eigen::AngleAxisd(a, Vector3d::UnitX()).toRotationMatrix();
}

Matrix3d rot_y(double a) {
  return Eigen::AngleAxisd(a, Vector3d::UnitY()).toRotationMatrix();
}

struct ChainTerms {
  Matrix3d r_abd;
  Matrix3d r_hip;
  Vector3d abd_link;   // hip-roll offset, abduction frame
  Vector3d thigh;      // abduction frame after hip rotation
  Vector3d shank;      // abduction frame after hip and knee rotation
};

ChainTerms chain_terms(const RobotParams& params, int leg, const LegJointAngles& q) {
  const auto& l = params.link_lengths;
  ChainTerms c;
  c.r_abd = rot_x(q[0]);
  c.r_hip = rot_y(q[1]);
  c.abd_link = Vector3d(0.0, side_sign(leg) * l.hip_roll_offset, 0.0);
  c.thigh = c.r_hip * Vector3d(0.0, 0.0, -l.thigh);
  c.shank = c.r_hip * rot_y(q[2]) * Vector3d(0.0, 0.0, -l.shank);
  return c;
}

}  // namespace

void RobotParams::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (!(mass > 0.0)) fail("mass must be positive");
  if (!inertia_body.isApprox(inertia_body.transpose(), 1e-12)) fail("inertia_body must be symmetric");
  if (inertia_body.llt().info() != Eigen::Success) fail("inertia_body must be positive definite");
  for (int i = 0; i < kNumLegs; ++i) {
    if (std::abs(thrust_dirs[i].norm() - 1.0) > 1e-9) {
      std::ostringstream os;
      os << "thrust_dirs[" << i << "] must have unit norm";
      fail(os.str());
    }
  }
  if (!(u_t_max > 0.0)) fail("u_t_max must be positive");
  if (!(mu_s > 0.0)) fail("mu_s must be positive");
  if (!(link_lengths.thigh > 0.0) || !(link_lengths.shank > 0.0)) fail("link lengths must be positive");
  if ((joint_limits.lower.array() > joint_limits.upper.array()).any()) fail("joint_limits lower > upper");
}

LegPoints leg_forward_kinematics(const RobotParams& params, int leg, const LegJointAngles& q) {
  const ChainTerms c = chain_terms(params, leg, q);
  const Vector3d& hip = params.hip_offsets[leg];
  LegPoints out;
  out.knee = hip + c.r_abd * (c.abd_link + c.thigh);
  out.foot = hip + c.r_abd * (c.abd_link + c.thigh + c.shank);
  return out;
}

Matrix3d leg_jacobian(const RobotParams& params, int leg, const LegJointAngles& q) {
  // Each revolute column is axis x (point - joint origin), expressed in the body frame.
  const ChainTerms c = chain_terms(params, leg, q);
  const Vector3d ex = Vector3d::UnitX();
  const Vector3d ey_abd = c.r_abd * Vector3d::UnitY();
  Matrix3d j;
  j.col(0) = ex.cross(c.r_abd * (c.abd_link + c.thigh + c.shank));
  j.col(1) = ey_abd.cross(c.r_abd * (c.thigh + c.shank));
  j.col(2) = ey_abd.cross(c.r_abd * c.shank);
  return j;
}

Vector3d thruster_position(const RobotParams& params, int leg, const LegJointAngles& q) {
  const Vector3d knee = leg_forward_kinematics(params, leg, q).knee;
  return knee + rot_x(q[0]) * Vector3d(0.0, side_sign(leg) * params.thruster_knee_offset, 0.0);
}

namespace {

IkResult dls(const RobotParams& params, int leg, const Vector3d& target_foot,
             const LegJointAngles& q_init, const IkOptions& options) {
  const auto& lim = params.joint_limits;
  LegJointAngles q = q_init.cwiseMax(lim.lower).cwiseMin(lim.upper);
  // A straight knee is a singular start; bend it so the chain can shorten.
  if (std::abs(q[2]) < 1e-3) {
    q[2] = std::clamp(options.knee_seed, lim.lower[2], lim.upper[2]);
  }

  const double lambda_sq = options.damping * options.damping;
  IkResult result;
  Vector3d err = target_foot - leg_forward_kinematics(params, leg, q).foot;
  result.q = q;
  result.residual = err.norm();

  int it = 0;
  for (; it < options.max_iterations && result.residual > options.stop_residual; ++it) {
    const Matrix3d j = leg_jacobian(params, leg, q);
    const Matrix3d jjt = j * j.transpose() + lambda_sq * Matrix3d::Identity();
    Vector3d dq = j.transpose() * jjt.ldlt().solve(err);
    const double biggest = dq.cwiseAbs().maxCoeff();
    if (biggest > options.max_step) dq *= options.max_step / biggest;
    q = (q + dq).cwiseMax(lim.lower).cwiseMin(lim.upper);
    err = target_foot - leg_forward_kinematics(params, leg, q).foot;
    const double res = err.norm();
    if (res < result.residual) {
      result.q = q;
      result.residual = res;
    }
  }
  result.iterations = it;
  result.converged = result.residual < options.tolerance;
  return result;
}

// Closed-form guesses, one per abduction branch, with the knee bent backward. Exact for the
// nominal geometry; only used to restart the iteration when it stalls against a limit.
std::vector<LegJointAngles> geometric_seeds(const RobotParams& params, int leg,
                                            const Vector3d& target_foot) {
  const auto& l = params.link_lengths;
  const Vector3d v = target_foot - params.hip_offsets[leg];
  const double off = side_sign(leg) * l.hip_roll_offset;
  const double r_yz = std::hypot(v.y(), v.z());
  std::vector<LegJointAngles> seeds;
  if (r_yz < 1e-9) return seeds;
  const double alpha = std::atan2(v.z(), v.y());
  const double spread = std::acos(std::clamp(off / r_yz, -1.0, 1.0));
  for (double q0 : {alpha + spread, alpha - spread}) {
    q0 = std::remainder(q0, 2.0 * M_PI);
    // Undo the abduction; the remaining chain lies in the abduction frame's xz plane.
    const Vector3d w = rot_x(-q0) * v;
    const double xp = w.x();
    const double zp = w.z();
    const double d_sq = xp * xp + zp * zp;
    const double c2 = std::clamp((d_sq - l.thigh * l.thigh - l.shank * l.shank) / (2.0 * l.thigh * l.shank),
                                 -1.0, 1.0);
    const double q2 = -std::acos(c2);
    const double phi = std::atan2(-xp, -zp);
    const double q1 = phi - std::atan2(l.shank * std::sin(q2), l.thigh + l.shank * std::cos(q2));
    seeds.emplace_back(q0, std::remainder(q1, 2.0 * M_PI), q2);
  }
  return seeds;
}

}  // namespace

IkResult solve_leg_ik(const RobotParams& params, int leg, const Vector3d& target_foot,
                      const LegJointAngles& q_init, const IkOptions& options) {
  IkResult best = dls(params, leg, target_foot, q_init, options);
  if (best.converged) return best;
  int total = best.iterations;
  for (const LegJointAngles& seed : geometric_seeds(params, leg, target_foot)) {
    const IkResult r = dls(params, leg, target_foot, seed, options);
    total += r.iterations;
    if (r.residual < best.residual) best = r;
    if (best.converged) break;
  }
  best.iterations = total;
  return best;
}

LegJointAngles leg_inverse_kinematics(const RobotParams& params, int leg,
                                      const Vector3d& target_foot, const LegJointAngles& q_init,
                                      const IkOptions& options) {
  IkResult r = solve_leg_ik(params, leg, target_foot, q_init, options);
  if (!r.converged) {
    std::ostringstream os;
    os << "leg " << leg << " IK did not converge after " << r.iterations
       << " iterations, residual " << r.residual << " m";
    throw NoConvergence(os.str(), r.q, r.residual, r.iterations);
  }
  return r.q;
}

Vector3d joint_command(const Vector3d& q_desired, const Vector3d& q, const Vector3d& qd_desired,
                       const Vector3d& qd, const Vector3d& tau_ff, const JointGains& gains) {
  return gains.kp.cwiseProduct(q_desired - q) + gains.kd.cwiseProduct(qd_desired - qd) + tau_ff;
}

}  // namespace thrustwalk
