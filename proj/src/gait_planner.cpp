#include "thrustwalk/gait_planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "thrustwalk/errors.hpp"

namespace thrustwalk {

namespace {

// Absorbs rounding when t lands on a phase boundary, e.g. 0.3 = 30 * 0.01.
constexpr double kBoundarySlack = 1e-9;

}  // namespace

GaitState trot_schedule(double t, double stance_duration, double swing_duration, double offset) {
  if (!(stance_duration > 0.0) || !(swing_duration > 0.0)) {
    throw std::invalid_argument("trot_schedule: durations must be positive");
  }
  const double period = stance_duration + swing_duration;
  GaitState g;
  g.stance_duration = stance_duration;
  g.swing_duration = swing_duration;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const bool pair_a = leg == 0 || leg == 3;
    const double shift = pair_a ? 0.0 : 0.5 * period;
    double local = std::fmod(t + offset + shift, period);
    if (local < 0.0) local += period;
    if (period - local < kBoundarySlack) local = 0.0;
    if (std::abs(local - stance_duration) < kBoundarySlack) local = stance_duration;
    if (local < stance_duration) {
      g.stance_flags[leg] = true;
      g.phase[leg] = local / stance_duration;
    } else {
      g.stance_flags[leg] = false;
      g.phase[leg] = std::min(1.0, (local - stance_duration) / swing_duration);
    }
  }
  return g;
}

Vector3d raibert_target(const Vector3d& p_ref, const Vector3d& v, const Vector3d& v_desired,
                        double stance_duration, double gain, double ground_z) {
  Vector3d p = p_ref + v * (stance_duration / 2.0) + gain * (v - v_desired);
  p.z() = ground_z;
  return p;
}

Vector3d clamp_to_beam(const Vector3d& target, double centerline, double width, double margin) {
  const double half = std::max(0.0, width / 2.0 - margin);
  Vector3d out = target;
  out.y() = std::clamp(target.y(), centerline - half, centerline + half);
  return out;
}

Vector3d clamp_to_reach(const Vector3d& target, const Vector3d& hip_ground, double hip_height,
                        double max_reach) {
  const double r2 = max_reach * max_reach - hip_height * hip_height;
  const double r_max = r2 > 0.0 ? std::sqrt(r2) : 0.0;
  Eigen::Vector2d off = (target - hip_ground).head<2>();
  const double n = off.norm();
  if (n <= r_max) return target;
  Vector3d out = target;
  out.head<2>() = hip_ground.head<2>() + off * (r_max / n);
  return out;
}

SwingCurve build_swing_curve(const Vector3d& liftoff, const Vector3d& target, double apex_height) {
  if (!(apex_height > 0.0)) throw std::invalid_argument("build_swing_curve: apex_height must be > 0");
  SwingCurve c;
  Vector3d apex = 0.5 * (liftoff + target);
  apex.z() = std::max(liftoff.z(), target.z()) + apex_height;
  c.control_points = {liftoff, liftoff, apex, target, target};
  return c;
}

SwingSample eval_swing(const SwingCurve& curve, double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw PhaseOutOfRange("swing phase " + std::to_string(s) + " outside [0, 1]");
  }
  const auto& p = curve.control_points;
  const double t = 1.0 - s;
  const double b4[5] = {t * t * t * t, 4 * s * t * t * t, 6 * s * s * t * t, 4 * s * s * s * t,
                        s * s * s * s};
  const double b3[4] = {t * t * t, 3 * s * t * t, 3 * s * s * t, s * s * s};
  SwingSample out{Vector3d::Zero(), Vector3d::Zero()};
  for (int i = 0; i < 5; ++i) out.pos += b4[i] * p[i];
  // Hodograph: the doubled endpoints make its first and last control points exactly zero.
  for (int i = 0; i < 4; ++i) out.vel += 4.0 * b3[i] * (p[i + 1] - p[i]);
  return out;
}

}  // namespace thrustwalk
