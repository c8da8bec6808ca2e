#pragma once

#include <optional>

#include "thrustwalk/types.hpp"

namespace thrustwalk {

struct GaitConfig {
  double stance_duration = 0.3;
  double swing_duration = 0.3;
  double offset = 0.0;          // time shift of the schedule, s
  double raibert_gain = 0.03;   // s
  double apex_height = 0.05;    // m above the higher endpoint
  double foot_margin = 0.01;    // m kept from the beam edge
  // Nominal lateral foot offset from the body centerline. Unset keeps feet under the hips.
  std::optional<double> stance_half_width;
  // Touchdown targets stay within this fraction of full leg extension from the hip.
  double reach_fraction = 0.9;
};

struct GaitState {
  ContactFlags stance_flags{};
  PerLeg<double> phase{};  // progress through the current stance or swing interval, [0, 1]
  double stance_duration = 0.3;
  double swing_duration = 0.3;
  PerLeg<Vector3d> liftoff_pos{Vector3d::Zero(), Vector3d::Zero(), Vector3d::Zero(), Vector3d::Zero()};
  PerLeg<Vector3d> target_pos{Vector3d::Zero(), Vector3d::Zero(), Vector3d::Zero(), Vector3d::Zero()};
};

/// Trot: (FL, RR) start in stance at t = 0, (FR, RL) run half a period behind.
GaitState trot_schedule(double t, double stance_duration, double swing_duration, double offset = 0.0);

/// p_ref + v T_s / 2 + k (v - v_d), with the vertical coordinate set to ground_z.
Vector3d raibert_target(const Vector3d& p_ref, const Vector3d& v, const Vector3d& v_desired,
                        double stance_duration, double gain, double ground_z);

/// Clamps the lateral coordinate into [center - (width/2 - margin), center + (width/2 - margin)].
Vector3d clamp_to_beam(const Vector3d& target, double centerline, double width, double margin);

/// Pulls target toward hip_ground in the horizontal plane so the distance from a hip at height
/// hip_height above the target stays within max_reach. Never moves the target vertically.
Vector3d clamp_to_reach(const Vector3d& target, const Vector3d& hip_ground, double hip_height,
                        double max_reach);

/// Quartic Bezier with doubled endpoints: P0 = P1 = lift-off, P3 = P4 = target.
struct SwingCurve {
  std::array<Vector3d, 5> control_points;
};

SwingCurve build_swing_curve(const Vector3d& liftoff, const Vector3d& target, double apex_height);

struct SwingSample {
  Vector3d pos;
  Vector3d vel;  // per unit phase; divide by the swing duration for m/s
};

/// Throws PhaseOutOfRange for s outside [0, 1].
SwingSample eval_swing(const SwingCurve& curve, double s);

}  // namespace thrustwalk
