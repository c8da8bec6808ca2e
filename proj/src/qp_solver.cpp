#include "thrustwalk/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace thrustwalk {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Factorization state of the dual method: J = L^-T Q and the active rows' R factor.
struct ActiveSetFactor {
  MatrixXd J;
  MatrixXd R;
  std::vector<int> A;   // active row indices, slot iq holds the candidate
  VectorXd u;           // multipliers aligned with A
  int iq = 0;
  double r_norm = 1.0;

  ActiveSetFactor(const MatrixXd& j0, int n)
      : J(j0), R(MatrixXd::Zero(n, n)), A(n + 1, -1), u(VectorXd::Zero(n + 1)) {}

  // Givens-rotates d so that only its first iq+1 entries are nonzero, then appends it to R.
  bool add(VectorXd& d) {
    const int n = static_cast<int>(d.size());
    for (int j = n - 1; j >= iq + 1; --j) {
      double cc = d[j - 1];
      double ss = d[j];
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      d[j] = 0.0;
      ss /= h;
      cc /= h;
      if (cc < 0.0) {
        cc = -cc;
        ss = -ss;
        d[j - 1] = -h;
      } else {
        d[j - 1] = h;
      }
      const double xny = ss / (1.0 + cc);
      for (int k = 0; k < n; ++k) {
        const double t1 = J(k, j - 1);
        const double t2 = J(k, j);
        J(k, j - 1) = t1 * cc + t2 * ss;
        J(k, j) = xny * (t1 + J(k, j - 1)) - t2;
      }
    }
    ++iq;
    R.col(iq - 1).head(iq) = d.head(iq);
    if (std::abs(d[iq - 1]) <= kEps * r_norm) return false;
    r_norm = std::max(r_norm, std::abs(d[iq - 1]));
    return true;
  }

  void remove(int row) {
    const int n = static_cast<int>(J.rows());
    int qq = -1;
    for (int i = 0; i < iq; ++i) {
      if (A[i] == row) {
        qq = i;
        break;
      }
    }
    for (int i = qq; i < iq - 1; ++i) {
      A[i] = A[i + 1];
      u[i] = u[i + 1];
      R.col(i) = R.col(i + 1);
    }
    A[iq - 1] = A[iq];
    u[iq - 1] = u[iq];
    A[iq] = -1;
    u[iq] = 0.0;
    R.col(iq - 1).setZero();
    --iq;
    for (int j = qq; j < iq; ++j) {
      double cc = R(j, j);
      double ss = R(j + 1, j);
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      cc /= h;
      ss /= h;
      R(j + 1, j) = 0.0;
      if (cc < 0.0) {
        R(j, j) = -h;
        cc = -cc;
        ss = -ss;
      } else {
        R(j, j) = h;
      }
      const double xny = ss / (1.0 + cc);
      for (int k = j + 1; k < iq; ++k) {
        const double t1 = R(j, k);
        const double t2 = R(j + 1, k);
        R(j, k) = t1 * cc + t2 * ss;
        R(j + 1, k) = xny * (t1 + R(j, k)) - t2;
      }
      for (int k = 0; k < n; ++k) {
        const double t1 = J(k, j);
        const double t2 = J(k, j + 1);
        J(k, j) = t1 * cc + t2 * ss;
        J(k, j + 1) = xny * (J(k, j) + t1) - t2;
      }
    }
  }
};

void validate(const QpProblem& p) {
  const int n = p.num_variables();
  const int m = p.num_constraints();
  std::ostringstream os;
  if (p.P.rows() != n || p.P.cols() != n) {
    os << "P is " << p.P.rows() << "x" << p.P.cols() << ", expected " << n << "x" << n;
  } else if (m > 0 && (p.G.rows() != m || p.G.cols() != n)) {
    os << "G is " << p.G.rows() << "x" << p.G.cols() << ", expected " << m << "x" << n;
  } else if (m == 0 && p.G.size() != 0 && p.G.cols() != n) {
    os << "G has " << p.G.cols() << " columns, expected " << n;
  }
  if (!os.str().empty()) throw QpError(QpError::Kind::kInvalidProblem, os.str());
  const double scale = std::max(1.0, p.P.cwiseAbs().maxCoeff());
  if ((p.P - p.P.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw QpError(QpError::Kind::kInvalidProblem, "P is not symmetric");
  }
}

bool factor_ok(const Eigen::LLT<MatrixXd>& llt, double pivot_floor) {
  if (llt.info() != Eigen::Success) return false;
  const MatrixXd& l = llt.matrixLLT();
  for (int i = 0; i < l.rows(); ++i) {
    const double pivot = l(i, i) * l(i, i);
    if (!(pivot >= pivot_floor)) return false;
  }
  return true;
}

}  // namespace

double qp_objective(const QpProblem& problem, const VectorXd& x) {
  return 0.5 * x.dot(problem.P * x) + problem.q.dot(x);
}

QpSolution solve_qp(const QpProblem& problem, const QpOptions& options) {
  validate(problem);
  const int n = problem.num_variables();
  const int m = problem.num_constraints();
  const int max_iter = options.max_iterations > 0 ? options.max_iterations : 10 * (n + m);

  Eigen::LLT<MatrixXd> llt(problem.P);
  if (!factor_ok(llt, options.pivot_floor)) {
    llt.compute(problem.P + options.regularization * MatrixXd::Identity(n, n));
    if (!factor_ok(llt, options.pivot_floor)) {
      throw QpError(QpError::Kind::kNotPositiveDefinite,
                    "P is not positive definite (Cholesky failed after regularization)");
    }
  }

  const MatrixXd j0 = llt.matrixU().solve(MatrixXd::Identity(n, n));  // L^-T
  ActiveSetFactor f(j0, n);
  VectorXd x = -llt.solve(problem.q);

  std::vector<bool> active(m, false);
  std::vector<bool> excluded(m, false);
  VectorXd s(m);
  VectorXd d(n);
  VectorXd z(n);
  VectorXd r(n);
  int iterations = 0;

  auto row_normal = [&](int i) -> VectorXd { return -problem.G.row(i).transpose(); };
  auto bump = [&]() {
    if (++iterations > max_iter) {
      throw QpError(QpError::Kind::kMaxIterations,
                    "active-set iteration limit reached (" + std::to_string(max_iter) + ")");
    }
  };

  while (true) {
    bump();
    if (m > 0) s = problem.h - problem.G * x;

    int ip = -1;
    double worst = -options.feasibility_tol;
    for (int i = 0; i < m; ++i) {
      if (!active[i] && !excluded[i] && s[i] < worst) {
        worst = s[i];
        ip = i;
      }
    }
    if (ip < 0) break;

    const VectorXd x_old = x;
    const std::vector<int> a_old(f.A.begin(), f.A.begin() + f.iq);
    const VectorXd u_old = f.u.head(f.iq);

    const VectorXd np = row_normal(ip);
    f.u[f.iq] = 0.0;
    f.A[f.iq] = ip;

    while (true) {
      bump();
      const int iq = f.iq;
      d = f.J.transpose() * np;
      z = f.J.rightCols(n - iq) * d.tail(n - iq);
      if (iq > 0) {
        r.head(iq) = f.R.topLeftCorner(iq, iq).triangularView<Eigen::Upper>().solve(d.head(iq));
      }

      // Partial step: largest dual step keeping active multipliers non-negative.
      double t1 = kInf;
      int l = -1;
      for (int k = 0; k < iq; ++k) {
        if (r[k] > 0.0 && f.u[k] / r[k] < t1) {
          t1 = f.u[k] / r[k];
          l = f.A[k];
        }
      }
      // Full step: primal step making row ip tight.
      double t2 = kInf;
      if (z.squaredNorm() > kEps) {
        t2 = -s[ip] / z.dot(np);
        if (t2 < 0.0) t2 = kInf;
      }
      const double t = std::min(t1, t2);
      if (t == kInf) {
        throw QpError(QpError::Kind::kInfeasible,
                      "constraints are infeasible (unbounded dual step at row " +
                          std::to_string(ip) + ")");
      }

      if (t2 == kInf) {
        f.u.head(iq) -= t * r.head(iq);
        f.u[iq] += t;
        active[l] = false;
        f.remove(l);
        continue;
      }

      x += t * z;
      f.u.head(iq) -= t * r.head(iq);
      f.u[iq] += t;

      if (t2 <= t1) {
        if (f.add(d)) {
          active[ip] = true;
        } else {
          // Row ip depends linearly on the active set: drop it for good and rebuild the
          // factorization of the previous active set.
          excluded[ip] = true;
          x = x_old;
          f = ActiveSetFactor(j0, n);
          std::fill(active.begin(), active.end(), false);
          for (std::size_t k = 0; k < a_old.size(); ++k) {
            VectorXd dk = f.J.transpose() * row_normal(a_old[k]);
            f.A[f.iq] = a_old[k];
            f.add(dk);
            f.u[f.iq - 1] = u_old[static_cast<Eigen::Index>(k)];
            active[a_old[k]] = true;
          }
        }
        break;
      }

      active[l] = false;
      f.remove(l);
      s[ip] = problem.h[ip] - problem.G.row(ip).dot(x);
    }
  }

  for (int i = 0; i < m; ++i) {
    if (excluded[i] && s[i] < -1e-8) {
      throw QpError(QpError::Kind::kInfeasible,
                    "row " + std::to_string(i) + " conflicts with the active constraints");
    }
  }

  QpSolution sol;
  sol.x_star = x;
  sol.multipliers = VectorXd::Zero(m);
  for (int k = 0; k < f.iq; ++k) {
    sol.multipliers[f.A[k]] = f.u[k];
    sol.active_set.push_back(f.A[k]);
  }
  std::sort(sol.active_set.begin(), sol.active_set.end());
  sol.objective_value = qp_objective(problem, x);
  sol.iterations = iterations;
  return sol;
}

double KktReport::worst() const {
  return std::max({stationarity, primal_feasibility, dual_feasibility, complementarity});
}

KktReport check_kkt(const QpProblem& problem, const VectorXd& x, const VectorXd& multipliers) {
  KktReport rep;
  VectorXd grad = problem.P * x + problem.q;
  if (problem.num_constraints() > 0) {
    grad += problem.G.transpose() * multipliers;
    const VectorXd slack = problem.G * x - problem.h;
    rep.primal_feasibility = std::max(0.0, slack.maxCoeff());
    rep.dual_feasibility = std::max(0.0, (-multipliers).maxCoeff());
    rep.complementarity = multipliers.cwiseProduct(slack).cwiseAbs().maxCoeff();
  }
  rep.stationarity = grad.norm();
  return rep;
}

KktReport check_kkt(const QpProblem& problem, const QpSolution& solution) {
  return check_kkt(problem, solution.x_star, solution.multipliers);
}

}  // namespace thrustwalk
