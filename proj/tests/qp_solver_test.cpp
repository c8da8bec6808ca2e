#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qp_oracle.hpp"
#include "thrustwalk/qp_solver.hpp"

namespace thrustwalk {
namespace {

using oracle::projected_gradient_oracle;
using oracle::OracleResult;

using Eigen::MatrixXd;
using Eigen::VectorXd;

QpProblem random_problem(std::mt19937_64& rng, int n, int m) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> slack(0.0, 1.0);
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  QpProblem p;
  p.P = a.transpose() * a + 0.5 * MatrixXd::Identity(n, n);
  p.q = VectorXd(n);
  for (int i = 0; i < n; ++i) p.q[i] = 3.0 * g(rng);
  p.G = MatrixXd(m, n);
  VectorXd x0(n);
  for (int i = 0; i < n; ++i) x0[i] = g(rng);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) p.G(i, j) = g(rng);
  // Feasible by construction: x0 satisfies every row with some slack.
  p.h = p.G * x0;
  for (int i = 0; i < m; ++i) p.h[i] += slack(rng);
  return p;
}

TEST(SolveQp, IdentityUnconstrained) {
  QpProblem p;
  p.P = MatrixXd::Identity(3, 3);
  p.q = VectorXd::Zero(3);
  p.G = MatrixXd(0, 3);
  p.h = VectorXd(0);
  const QpSolution s = solve_qp(p);
  EXPECT_LT(s.x_star.norm(), 1e-15);
  EXPECT_EQ(s.objective_value, 0.0);
  EXPECT_TRUE(s.active_set.empty());
}

TEST(SolveQp, BoxCorner) {
  QpProblem p;
  p.P = MatrixXd::Identity(2, 2);
  p.q = VectorXd::Zero(2);
  p.G = -MatrixXd::Identity(2, 2);
  p.h = -VectorXd::Ones(2);
  const QpSolution s = solve_qp(p);
  EXPECT_NEAR(s.x_star[0], 1.0, 1e-12);
  EXPECT_NEAR(s.x_star[1], 1.0, 1e-12);
  EXPECT_EQ(s.active_set, (std::vector<int>{0, 1}));
  EXPECT_NEAR(s.multipliers[0], 1.0, 1e-12);
  EXPECT_NEAR(s.objective_value, 1.0, 1e-12);
}

TEST(SolveQp, MatchesProjectedGradientOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> nd(2, 10), md(1, 16);
  double worst_gap = 0.0, worst_kkt = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const QpProblem p = random_problem(rng, nd(rng), md(rng));
    const QpSolution s = solve_qp(p);
    const OracleResult o = projected_gradient_oracle(p);
    const double gap = std::abs(s.objective_value - o.dual_value) / std::max(1.0, std::abs(o.dual_value));
    worst_gap = std::max(worst_gap, gap);
    worst_kkt = std::max(worst_kkt, check_kkt(p, s).worst());
    EXPECT_LT(gap, 1e-6) << "trial " << trial;
    EXPECT_NEAR(s.objective_value, qp_objective(p, s.x_star), 1e-9);
  }
  EXPECT_LT(worst_kkt, 1e-6);
  RecordProperty("worst_objective_gap", std::to_string(worst_gap));
}

TEST(SolveQp, RowOrderDoesNotMatter) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    QpProblem p = random_problem(rng, 6, 10);
    const QpSolution a = solve_qp(p);
    std::vector<int> perm(p.h.size());
    for (int i = 0; i < static_cast<int>(perm.size()); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    QpProblem q = p;
    for (int i = 0; i < static_cast<int>(perm.size()); ++i) {
      q.G.row(i) = p.G.row(perm[i]);
      q.h[i] = p.h[perm[i]];
    }
    EXPECT_LT((solve_qp(q).x_star - a.x_star).norm(), 1e-8);
  }
}

TEST(SolveQp, CostScalingKeepsArgmin) {
  std::mt19937_64 rng(10);
  QpProblem p = random_problem(rng, 7, 9);
  const QpSolution a = solve_qp(p);
  p.P *= 37.5;
  p.q *= 37.5;
  EXPECT_LT((solve_qp(p).x_star - a.x_star).norm(), 1e-8);
}

TEST(CheckKkt, DetectsPerturbationAndExactUnconstrained) {
  std::mt19937_64 rng(12);
  const QpProblem p = random_problem(rng, 5, 6);
  const QpSolution s = solve_qp(p);
  EXPECT_LT(check_kkt(p, s).worst(), 1e-6);
  VectorXd x = s.x_star;
  x[0] += 0.1;
  EXPECT_GT(check_kkt(p, x, s.multipliers).stationarity, 1e-3);

  QpProblem u = p;
  u.G = MatrixXd(0, 5);
  u.h = VectorXd(0);
  const VectorXd xu = -u.P.llt().solve(u.q);
  EXPECT_LT(check_kkt(u, xu, VectorXd(0)).stationarity, 1e-10);
}

TEST(SolveQp, ErrorKinds) {
  auto kind_of = [](const QpProblem& p) {
    try {
      solve_qp(p);
    } catch (const QpError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "no error";
    return QpError::Kind::kInvalidProblem;
  };

  QpProblem infeasible;
  infeasible.P = MatrixXd::Identity(1, 1);
  infeasible.q = VectorXd::Zero(1);
  infeasible.G = MatrixXd(2, 1);
  infeasible.G << 1, -1;  // x <= -1 and x >= 1
  infeasible.h = VectorXd::Constant(2, -1.0);
  EXPECT_EQ(kind_of(infeasible), QpError::Kind::kInfeasible);

  QpProblem indefinite;
  indefinite.P = MatrixXd::Identity(2, 2);
  indefinite.P(1, 1) = -1.0;
  indefinite.q = VectorXd::Zero(2);
  indefinite.G = MatrixXd(0, 2);
  indefinite.h = VectorXd(0);
  EXPECT_EQ(kind_of(indefinite), QpError::Kind::kNotPositiveDefinite);

  QpProblem bad = indefinite;
  bad.P = MatrixXd::Identity(3, 3);
  EXPECT_EQ(kind_of(bad), QpError::Kind::kInvalidProblem);

  std::mt19937_64 rng(1);
  const QpProblem hard = random_problem(rng, 8, 16);
  QpOptions tight;
  tight.max_iterations = 1;
  try {
    const QpSolution s = solve_qp(hard, tight);
    // Only possible when the unconstrained minimum is already feasible.
    EXPECT_TRUE(s.active_set.empty());
  } catch (const QpError& e) {
    EXPECT_EQ(e.kind(), QpError::Kind::kMaxIterations);
  }
}

}  // namespace
}  // namespace thrustwalk
