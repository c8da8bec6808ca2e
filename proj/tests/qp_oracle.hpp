#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "thrustwalk/qp_solver.hpp"

namespace thrustwalk::oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Accelerated projected gradient on the dual:
//   max_{lambda >= 0}  -1/2 (q + G'lambda)' P^-1 (q + G'lambda) - h'lambda
// The dual value at the optimum equals the primal optimum, so it serves as an objective oracle
// that shares no code with the active-set solver.
struct OracleResult {
  double dual_value;
  VectorXd x;
};

inline OracleResult projected_gradient_oracle(const QpProblem& p, int iterations = 100000) {
  const Eigen::LDLT<MatrixXd> ldlt(p.P);
  const MatrixXd pinv = ldlt.solve(MatrixXd::Identity(p.P.rows(), p.P.cols()));
  const MatrixXd hd = p.G * pinv * p.G.transpose();
  const VectorXd c = p.G * pinv * p.q + p.h;
  const double lipschitz = std::max(1e-12, Eigen::SelfAdjointEigenSolver<MatrixXd>(hd).eigenvalues().maxCoeff());
  const double step = 1.0 / lipschitz;

  auto dual = [&](const VectorXd& l) {
    const VectorXd w = p.q + p.G.transpose() * l;
    return -0.5 * w.dot(pinv * w) - p.h.dot(l);
  };

  VectorXd lam = VectorXd::Zero(p.h.size());
  VectorXd y = lam;
  double t = 1.0;
  double best = dual(lam);
  for (int k = 0; k < iterations; ++k) {
    const VectorXd next = (y - step * (hd * y + c)).cwiseMax(0.0);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double value = dual(next);
    if (value < best) {
      // Monotone restart keeps FISTA from oscillating near the optimum.
      y = lam;
      t = 1.0;
      continue;
    }
    best = value;
    y = next + ((t - 1.0) / t_next) * (next - lam);
    lam = next;
    t = t_next;
  }
  return {best, -pinv * (p.q + p.G.transpose() * lam)};
}

}  // namespace thrustwalk::oracle
