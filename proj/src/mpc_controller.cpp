#include "thrustwalk/mpc_controller.hpp"

#include <cmath>
#include <stdexcept>

#include "thrustwalk/condense.hpp"

namespace thrustwalk {

double MpcConfig::pyramid_coefficient() const {
  return inscribed_pyramid ? mu / std::sqrt(2.0) : mu;
}

void MpcConfig::validate() const {
  auto fail = [](const char* msg) { throw std::invalid_argument(msg); };
  if (horizon < 1) fail("mpc.horizon must be >= 1");
  if (!(dt > 0.0)) fail("mpc.dt must be positive");
  if (!(rate_hz > 0.0)) fail("mpc.rate_hz must be positive");
  if ((q_diag.array() < 0.0).any()) fail("mpc.Q must be positive semidefinite");
  if ((r_diag.array() <= 0.0).any()) fail("mpc.R must be positive definite");
  if (!(mu > 0.0)) fail("mpc.mu must be positive");
  if (u_t_max < 0.0) fail("mpc.u_t_max must be non-negative");
}

ReferenceTrajectory build_reference(const RobotState& state, const MpcCommand& command,
                                    const MpcConfig& config) {
  ReferenceTrajectory ref;
  ref.x_r.reserve(config.horizon);
  for (int k = 1; k <= config.horizon; ++k) {
    const double tk = k * config.dt;
    RobotState s;
    s.theta = Vector3d(0.0, 0.0, state.theta.z() + command.yaw_rate * tk);
    s.p = state.p + command.v_desired * tk;
    s.p.z() = command.height;
    if (command.lateral_anchor) s.p.y() = *command.lateral_anchor;
    s.omega = Vector3d(0.0, 0.0, command.yaw_rate);
    s.pdot = command.v_desired;
    ref.x_r.push_back(s.to_vector());
  }
  return ref;
}

int constraint_rows_per_step(const ContactFlags& stance) {
  int rows = 2 * kNumLegs;  // thrust bounds
  for (bool s : stance) rows += s ? 5 : 6;
  return rows;
}

QpProblem assemble_qp(const RobotState& state, const ContactSchedule& schedule,
                      std::span<const LinearModel> models, const ReferenceTrajectory& ref,
                      const MpcConfig& config) {
  const int nh = config.horizon;
  if (static_cast<int>(models.size()) != nh || static_cast<int>(schedule.size()) != nh ||
      static_cast<int>(ref.x_r.size()) != nh) {
    throw DimensionMismatch("assemble_qp: horizon " + std::to_string(nh) + " but got " +
                            std::to_string(models.size()) + " models, " +
                            std::to_string(schedule.size()) + " contact steps, " +
                            std::to_string(ref.x_r.size()) + " reference states");
  }

  const CondensedCost cost =
      condense(models, state.to_vector(), ref.x_r, config.q_diag, config.r_diag);

  int m = 0;
  for (const auto& flags : schedule) m += constraint_rows_per_step(flags);
  const int n = kInputDim * nh;

  QpProblem qp;
  qp.P = cost.hessian;
  qp.q = cost.gradient;
  qp.G = Eigen::MatrixXd::Zero(m, n);
  qp.h = Eigen::VectorXd::Zero(m);

  const double mu = config.pyramid_coefficient();
  const double thrust_cap = config.thrusters_enabled ? config.u_t_max : 0.0;
  int row = 0;
  for (int k = 0; k < nh; ++k) {
    const int base = kInputDim * k;
    for (int leg = 0; leg < kNumLegs; ++leg) {
      const int ix = base + 3 * leg;
      const int iy = ix + 1;
      const int iz = ix + 2;
      if (schedule[k][leg]) {
        qp.G(row++, iz) = -1.0;
        for (int axis : {ix, iy}) {
          qp.G(row, axis) = 1.0;
          qp.G(row++, iz) = -mu;
          qp.G(row, axis) = -1.0;
          qp.G(row++, iz) = -mu;
        }
      } else {
        for (int axis : {ix, iy, iz}) {
          qp.G(row++, axis) = 1.0;
          qp.G(row++, axis) = -1.0;
        }
      }
    }
    for (int i = 0; i < kNumLegs; ++i) {
      const int it = base + 12 + i;
      qp.G(row++, it) = -1.0;
      qp.G(row, it) = 1.0;
      qp.h(row++) = thrust_cap;
    }
  }
  return qp;
}

MpcResult mpc_step(const RobotState& state, const ContactSchedule& schedule,
                   const KinematicsSnapshot& kin, const ReferenceTrajectory& ref,
                   const MpcConfig& config, const RobotParams& params, long step_index) {
  const LinearModel model = discretize(build_continuous_model(state, kin.d, kin.r, params), config.dt);
  const std::vector<LinearModel> models(config.horizon, model);
  const QpProblem qp = assemble_qp(state, schedule, models, ref, config);

  QpSolution sol;
  try {
    sol = solve_qp(qp);
  } catch (const QpError& e) {
    throw SolverFailure("MPC solve " + std::to_string(step_index) + " failed: " + e.what(),
                        step_index);
  }
  MpcResult out;
  out.first_input = sol.x_star.head<kInputDim>();
  // Pinned rows leave rounding-level residue on swing legs; the plant expects exact zeros.
  for (int leg = 0; leg < kNumLegs; ++leg) {
    if (!schedule[0][leg]) out.first_input.segment<3>(3 * leg).setZero();
  }
  out.u = ControlInput::from_vector(out.first_input);
  out.qp_iterations = sol.iterations;
  out.objective = sol.objective_value;
  return out;
}

MpcController::MpcController(MpcConfig config, RobotParams params)
    : config_(std::move(config)), params_(std::move(params)) {
  config_.validate();
}

MpcResult MpcController::step(const RobotState& state, const ContactSchedule& schedule,
                              const KinematicsSnapshot& kin, const MpcCommand& command) {
  const ReferenceTrajectory ref = build_reference(state, command, config_);
  return mpc_step(state, schedule, kin, ref, config_, params_, solves_++);
}

}  // namespace thrustwalk
