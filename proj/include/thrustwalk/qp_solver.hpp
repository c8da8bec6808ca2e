#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thrustwalk/errors.hpp"

namespace thrustwalk {

/// minimize 1/2 x'Px + q'x  subject to  Gx <= h
struct QpProblem {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  Eigen::MatrixXd G;  // m x n, m may be 0
  Eigen::VectorXd h;

  int num_variables() const { return static_cast<int>(q.size()); }
  int num_constraints() const { return static_cast<int>(h.size()); }
};

struct QpSolution {
  Eigen::VectorXd x_star;
  Eigen::VectorXd multipliers;  // one per constraint row, zero off the active set
  std::vector<int> active_set;  // sorted row indices
  double objective_value = 0.0;
  int iterations = 0;
};

struct QpOptions {
  double feasibility_tol = 1e-10;  // a row is violated when h - Gx < -feasibility_tol
  double pivot_floor = 1e-12;      // smallest accepted Cholesky pivot
  double regularization = 1e-9;    // added once to P when the factorization fails
  int max_iterations = 0;          // 0 selects 10 (n + m)
};

class QpError : public Error {
 public:
  enum class Kind { kInfeasible, kNotPositiveDefinite, kMaxIterations, kInvalidProblem };

  QpError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Goldfarb-Idnani dual active-set method. Starts from the unconstrained minimum and adds
/// the most violated row each outer iteration (lowest index on ties).
QpSolution solve_qp(const QpProblem& problem, const QpOptions& options = {});

struct KktReport {
  double stationarity = 0.0;         // ||Px + q + G'lambda||_2
  double primal_feasibility = 0.0;   // max(0, max_i (Gx - h)_i)
  double dual_feasibility = 0.0;     // max(0, max_i -lambda_i)
  double complementarity = 0.0;      // max_i |lambda_i (Gx - h)_i|

  double worst() const;
};

KktReport check_kkt(const QpProblem& problem, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& multipliers);
KktReport check_kkt(const QpProblem& problem, const QpSolution& solution);

double qp_objective(const QpProblem& problem, const Eigen::VectorXd& x);

}  // namespace thrustwalk
