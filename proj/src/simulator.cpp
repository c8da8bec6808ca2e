#include "thrustwalk/simulator.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "thrustwalk/errors.hpp"

namespace thrustwalk {

bool Terrain::supports(const Vector3d& foot) const {
  if (kind == Kind::kFlat) return true;
  return std::abs(foot.y() - centerline) <= width / 2.0 + 1e-12;
}

void Scenario::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (duration < 0.0) fail("duration must be non-negative");
  if (!(sim_dt > 0.0)) fail("sim_dt must be positive");
  if (!(height > 0.0)) fail("command height must be positive");
  if (!(mu_real > 0.0)) fail("mu_real must be positive");
  if (terrain.kind == Terrain::Kind::kBeam && !(terrain.width > 0.0)) fail("beam width must be positive");
  for (const auto& d : disturbances) {
    if (!(d.t_start < d.t_end)) fail("disturbance t_start must precede t_end");
  }
}

Vector3d Scenario::external_force(double t) const {
  Vector3d f = Vector3d::Zero();
  for (const auto& d : disturbances) {
    if (t >= d.t_start && t < d.t_end) f += d.force;
  }
  return f;
}

const char* to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::kSlip: return "Slip";
    case FailureKind::kBeamMiss: return "BeamMiss";
    case FailureKind::kRollDivergence: return "RollDivergence";
    case FailureKind::kHeightCollapse: return "HeightCollapse";
  }
  return "Unknown";
}

Accelerations plant_accel(const RobotState& state, const ControlInput& u, const LeverArms& d,
                          const LeverArms& r, const Vector3d& f_ext, const RobotParams& params) {
  const Matrix3d rot = rotation_from_euler(state.theta);
  const Matrix3d inertia_world = rot * params.inertia_body * rot.transpose();

  Vector3d force = f_ext;
  Vector3d torque = Vector3d::Zero();
  for (int i = 0; i < kNumLegs; ++i) {
    const Vector3d thrust = rot * params.thrust_dirs[i] * u.u_t[i];
    force += thrust + u.u_g[i];
    torque += r[i].cross(thrust) + d[i].cross(u.u_g[i]);
  }
  torque -= state.omega.cross(inertia_world * state.omega);

  Accelerations a;
  a.pddot = force / params.mass - Vector3d(0.0, 0.0, params.g);
  a.omegadot = inertia_world.llt().solve(torque);
  return a;
}

RobotState step(const RobotState& state, const ControlInput& u, const LeverArms& d,
                const LeverArms& r, const Vector3d& f_ext, const RobotParams& params, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const Accelerations a = plant_accel(state, u, d, r, f_ext, params);
  RobotState next;
  next.omega = state.omega + a.omegadot * dt;
  next.pdot = state.pdot + a.pddot * dt;
  next.theta = state.theta + euler_rates(state.theta, next.omega, EulerRateMode::kExact) * dt;
  next.p = state.p + next.pdot * dt;
  return next;
}

double friction_ratio(const Vector3d& u_g, double unloaded_threshold) {
  if (u_g.z() <= unloaded_threshold) return 0.0;
  return u_g.head<2>().norm() / u_g.z();
}

std::vector<ContactViolation> check_contact_legality(const ControlInput& u,
                                                     const ContactFlags& stance,
                                                     const PerLeg<Vector3d>& feet,
                                                     const Terrain& terrain, double mu_real,
                                                     double force_tolerance) {
  std::vector<ContactViolation> out;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    if (!stance[leg]) continue;
    const Vector3d& f = u.u_g[leg];
    const double tangential = f.head<2>().norm();
    if (f.z() < -force_tolerance || tangential > mu_real * f.z() + force_tolerance) {
      std::ostringstream os;
      os << "leg " << leg << " |f_xy| = " << tangential << " N exceeds mu * f_z = "
         << mu_real * f.z() << " N";
      out.push_back({FailureKind::kSlip, leg, os.str()});
    }
    if (!terrain.supports(feet[leg])) {
      std::ostringstream os;
      os << "leg " << leg << " foot at y = " << feet[leg].y() << " m is off the beam";
      out.push_back({FailureKind::kBeamMiss, leg, os.str()});
    }
  }
  return out;
}

namespace {

// Per-leg swing bookkeeping between plant steps.
struct LegTrack {
  bool stance = true;
  Vector3d foot = Vector3d::Zero();
  Vector3d liftoff = Vector3d::Zero();
  Vector3d target = Vector3d::Zero();
  SwingCurve curve{};
  LegJointAngles q = LegJointAngles::Zero();
};

class ClosedLoop {
 public:
  ClosedLoop(const Scenario& scenario, const RobotParams& params, const MpcConfig& mpc,
             const GaitConfig& gait, const SimOptions& options)
      : sc_(scenario),
        params_(params),
        mpc_cfg_(mpc),
        gait_(gait),
        opt_(options),
        controller_(effective_mpc(mpc, scenario), params) {
    surface_ = sc_.terrain.surface_height();
    command_.v_desired = sc_.v_desired;
    command_.yaw_rate = sc_.yaw_rate;
    command_.height = surface_ + sc_.height;
    if (sc_.terrain.kind == Terrain::Kind::kBeam) command_.lateral_anchor = sc_.terrain.centerline;
  }

  RunResult run() {
    RunResult result;
    const double dt = sc_.sim_dt;
    const long n_steps = std::lround(sc_.duration / dt);
    const long control_every = std::max(1L, std::lround(1.0 / (mpc_cfg_.rate_hz * dt)));
    result.log.rows.reserve(static_cast<std::size_t>(std::max(0L, n_steps)));

    init_state();
    ControlInput u_hold;
    for (long i = 0; i < n_steps; ++i) {
      const double t = static_cast<double>(i) * dt;
      const GaitState gs = trot_schedule(t, gait_.stance_duration, gait_.swing_duration, gait_.offset);
      update_contacts(gs, i == 0);
      if (i % control_every == 0) {
        update_targets(gs);
        try {
          u_hold = solve_mpc(t);
        } catch (const SolverFailure& e) {
          result.outcome.kind = RunOutcome::Kind::kSolverFailure;
          result.outcome.message = e.what();
          result.log.events.emplace_back(t, e.what());
          return result;
        }
      }
      move_swing_feet(gs);

      ControlInput u = u_hold;
      ContactFlags stance{};
      const Matrix3d body_rot = rotation_from_euler(state_.theta);
      for (int leg = 0; leg < kNumLegs; ++leg) {
        stance[leg] = legs_[leg].stance;
        if (!stance[leg]) u.u_g[leg].setZero();
        // A leg stretched past full extension cannot push on the ground.
        const Vector3d hip = state_.p + body_rot * params_.hip_offsets[leg];
        if (stance[leg] && (legs_[leg].foot - hip).norm() > params_.leg_reach()) u.u_g[leg].setZero();
        if (!sc_.thrusters_enabled) u.u_t[leg] = 0.0;
      }

      LeverArms d;
      LeverArms r;
      for (int leg = 0; leg < kNumLegs; ++leg) {
        d[leg] = legs_[leg].foot - state_.p;
        r[leg] = body_rot * thruster_position(params_, leg, legs_[leg].q);
      }

      LogRow row;
      row.t = t;
      row.state = state_;
      row.u = u;
      row.stance = stance;
      row.d = d;
      row.r = r;
      for (int leg = 0; leg < kNumLegs; ++leg) {
        row.feet[leg] = legs_[leg].foot;
        row.friction_ratio[leg] =
            stance[leg] ? friction_ratio(u.u_g[leg], opt_.thresholds.unloaded_threshold) : 0.0;
      }
      result.log.rows.push_back(row);

      const auto violations = check_contact_legality(u, stance, row.feet, sc_.terrain, sc_.mu_real,
                                                     opt_.thresholds.force_tolerance);
      if (!violations.empty()) {
        fail(result, violations.front().kind, t, violations.front().detail);
        return result;
      }

      try {
        state_ = step(state_, u, d, r, sc_.external_force(t), params_, dt);
      } catch (const GimbalLock& e) {
        fail(result, FailureKind::kRollDivergence, t + dt, e.what());
        return result;
      }
      if (check_state(result, t + dt)) return result;
    }
    return result;
  }

 private:
  static MpcConfig effective_mpc(MpcConfig cfg, const Scenario& sc) {
    cfg.thrusters_enabled = cfg.thrusters_enabled && sc.thrusters_enabled;
    return cfg;
  }

  void init_state() {
    state_ = RobotState{};
    state_.p = Vector3d(0.0, command_.lateral_anchor.value_or(0.0), command_.height);
    if (sc_.initial_perturbation > 0.0) {
      std::mt19937_64 rng(sc_.seed);
      std::normal_distribution<double> kick(0.0, sc_.initial_perturbation);
      state_.pdot.y() = kick(rng);
    }
    for (int leg = 0; leg < kNumLegs; ++leg) {
      LegTrack& lt = legs_[leg];
      lt.foot = nominal_foot(leg);
      lt.target = lt.foot;
      lt.liftoff = lt.foot;
      lt.q = solve_leg_ik(params_, leg, body_frame(lt.foot), LegJointAngles::Zero(), opt_.ik).q;
    }
  }

  Vector3d body_frame(const Vector3d& world) const {
    return rotation_from_euler(state_.theta).transpose() * (world - state_.p);
  }

  Vector3d hip_ground_point(int leg) const {
    Vector3d hip = state_.p + yaw_rotation(state_.theta.z()) * params_.hip_offsets[leg];
    hip.z() = surface_;
    return hip;
  }

  // Hip projection, pulled toward the centerline when the gait asks for a narrow stance.
  Vector3d nominal_ground_point(int leg) const {
    Vector3d offset = params_.hip_offsets[leg];
    if (gait_.stance_half_width) offset.y() = side_sign(leg) * *gait_.stance_half_width;
    Vector3d p = state_.p + yaw_rotation(state_.theta.z()) * offset;
    p.z() = surface_;
    return p;
  }

  Vector3d on_terrain(const Vector3d& p) const {
    if (sc_.terrain.kind != Terrain::Kind::kBeam) return p;
    return clamp_to_beam(p, sc_.terrain.centerline, sc_.terrain.width, gait_.foot_margin);
  }

  Vector3d nominal_foot(int leg) const { return on_terrain(nominal_ground_point(leg)); }

  Vector3d raibert(int leg) const {
    const Vector3d p = raibert_target(nominal_ground_point(leg), state_.pdot, command_.v_desired,
                                      gait_.stance_duration, gait_.raibert_gain, surface_);
    return on_terrain(clamp_to_reach(p, hip_ground_point(leg), sc_.height,
                                     gait_.reach_fraction * params_.leg_reach()));
  }

  void update_contacts(const GaitState& gs, bool first) {
    for (int leg = 0; leg < kNumLegs; ++leg) {
      LegTrack& lt = legs_[leg];
      if (gs.stance_flags[leg] && !lt.stance) {
        lt.foot = lt.target;  // touchdown: pin where the swing curve ends
        lt.stance = true;
      } else if (!gs.stance_flags[leg] && (lt.stance || first)) {
        lt.liftoff = lt.foot;
        lt.target = raibert(leg);
        lt.curve = build_swing_curve(lt.liftoff, lt.target, gait_.apex_height);
        lt.stance = false;
      }
    }
  }

  void update_targets(const GaitState& gs) {
    for (int leg = 0; leg < kNumLegs; ++leg) {
      LegTrack& lt = legs_[leg];
      if (lt.stance || gs.stance_flags[leg]) continue;
      lt.target = raibert(leg);
      lt.curve = build_swing_curve(lt.liftoff, lt.target, gait_.apex_height);
    }
  }

  void move_swing_feet(const GaitState& gs) {
    for (int leg = 0; leg < kNumLegs; ++leg) {
      LegTrack& lt = legs_[leg];
      if (!lt.stance) lt.foot = eval_swing(lt.curve, gs.phase[leg]).pos;
    }
  }

  ControlInput solve_mpc(double t) {
    const Matrix3d rot = rotation_from_euler(state_.theta);
    KinematicsSnapshot kin;
    for (int leg = 0; leg < kNumLegs; ++leg) {
      LegTrack& lt = legs_[leg];
      lt.q = solve_leg_ik(params_, leg, body_frame(lt.foot), lt.q, opt_.ik).q;
      // Swing legs enter the model at their touchdown point.
      kin.d[leg] = (lt.stance ? lt.foot : lt.target) - state_.p;
      kin.r[leg] = rot * thruster_position(params_, leg, lt.q);
    }
    ContactSchedule schedule(mpc_cfg_.horizon);
    for (int k = 0; k < mpc_cfg_.horizon; ++k) {
      schedule[k] = trot_schedule(t + k * mpc_cfg_.dt, gait_.stance_duration, gait_.swing_duration,
                                  gait_.offset)
                        .stance_flags;
    }
    return controller_.step(state_, schedule, kin, command_).u;
  }

  bool check_state(RunResult& result, double t) {
    const double tilt = std::max(std::abs(state_.theta.x()), std::abs(state_.theta.y()));
    if (tilt > opt_.thresholds.max_tilt) {
      std::ostringstream os;
      os << "roll " << state_.theta.x() << " rad, pitch " << state_.theta.y() << " rad";
      fail(result, FailureKind::kRollDivergence, t, os.str());
      return true;
    }
    const double height = state_.p.z() - surface_;
    if (height < opt_.thresholds.min_height_fraction * sc_.height) {
      std::ostringstream os;
      os << "COM height " << height << " m below " << opt_.thresholds.min_height_fraction
         << " of " << sc_.height << " m";
      fail(result, FailureKind::kHeightCollapse, t, os.str());
      return true;
    }
    return false;
  }

  static void fail(RunResult& result, FailureKind kind, double t, const std::string& detail) {
    result.outcome.kind = RunOutcome::Kind::kFailure;
    result.outcome.failure = FailureEvent{kind, t, detail};
    result.outcome.message = std::string(to_string(kind)) + ": " + detail;
    result.log.events.emplace_back(t, result.outcome.message);
  }

  const Scenario& sc_;
  const RobotParams& params_;
  const MpcConfig& mpc_cfg_;
  const GaitConfig& gait_;
  const SimOptions& opt_;
  MpcController controller_;
  MpcCommand command_;
  double surface_ = 0.0;
  RobotState state_;
  PerLeg<LegTrack> legs_{};
};

}  // namespace

RunResult run(const Scenario& scenario, const RobotParams& params, const MpcConfig& mpc,
              const GaitConfig& gait, const SimOptions& options) {
  scenario.validate();
  params.validate();
  mpc.validate();
  ClosedLoop loop(scenario, params, mpc, gait, options);
  return loop.run();
}

}  // namespace thrustwalk
