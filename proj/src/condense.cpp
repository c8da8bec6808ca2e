#include "thrustwalk/condense.hpp"

#include <vector>

#include "thrustwalk/errors.hpp"

namespace thrustwalk {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_sizes(std::span<const LinearModel> models, std::span<const StateVector> x_ref) {
  if (models.empty()) throw DimensionMismatch("condense: empty horizon");
  if (x_ref.size() != models.size()) {
    throw DimensionMismatch("condense: " + std::to_string(x_ref.size()) + " reference states for " +
                            std::to_string(models.size()) + " models");
  }
}

}  // namespace

PredictionMatrices build_prediction_matrices(std::span<const LinearModel> models) {
  const int nh = static_cast<int>(models.size());
  PredictionMatrices pm;
  pm.T = MatrixXd::Zero(kStateDim * nh, kStateDim);
  pm.S = MatrixXd::Zero(kStateDim * nh, kInputDim * nh);
  StateMatrix phi = StateMatrix::Identity();
  for (int k = 0; k < nh; ++k) {
    phi = models[k].A * phi;
    pm.T.block<kStateDim, kStateDim>(kStateDim * k, 0) = phi;
    for (int j = 0; j < k; ++j) {
      pm.S.block<kStateDim, kInputDim>(kStateDim * k, kInputDim * j) =
          models[k].A * pm.S.block<kStateDim, kInputDim>(kStateDim * (k - 1), kInputDim * j);
    }
    pm.S.block<kStateDim, kInputDim>(kStateDim * k, kInputDim * k) = models[k].B;
  }
  return pm;
}

CondensedCost condense_reference(std::span<const LinearModel> models, const StateVector& x0,
                                 std::span<const StateVector> x_ref, const StateVector& q_diag,
                                 const InputVector& r_diag) {
  check_sizes(models, x_ref);
  const int nh = static_cast<int>(models.size());
  const PredictionMatrices pm = build_prediction_matrices(models);

  VectorXd q_bar(kStateDim * nh);
  VectorXd r_bar(kInputDim * nh);
  VectorXd xr(kStateDim * nh);
  for (int k = 0; k < nh; ++k) {
    q_bar.segment<kStateDim>(kStateDim * k) = q_diag;
    r_bar.segment<kInputDim>(kInputDim * k) = r_diag;
    xr.segment<kStateDim>(kStateDim * k) = x_ref[k];
  }

  CondensedCost c;
  const MatrixXd qs = q_bar.asDiagonal() * pm.S;
  c.hessian = pm.S.transpose() * qs;
  c.hessian = (0.5 * (c.hessian + c.hessian.transpose())).eval();
  c.hessian.diagonal() += r_bar;
  c.gradient = qs.transpose() * (pm.T * x0 - xr);
  return c;
}

CondensedCost condense(std::span<const LinearModel> models, const StateVector& x0,
                       std::span<const StateVector> x_ref, const StateVector& q_diag,
                       const InputVector& r_diag) {
  check_sizes(models, x_ref);
  const int nh = static_cast<int>(models.size());

  // s_blocks[k * nh + j] maps u_j to x_{k+1}; zero for j > k.
  std::vector<InputMatrix> s_blocks(static_cast<std::size_t>(nh * nh), InputMatrix::Zero());
  std::vector<StateVector> err(nh);  // free response minus reference
  StateVector free_x = x0;
  for (int k = 0; k < nh; ++k) {
    free_x = models[k].A * free_x;
    err[k] = free_x - x_ref[k];
    s_blocks[k * nh + k] = models[k].B;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < k; ++j) {
      s_blocks[k * nh + j] = models[k].A * s_blocks[(k - 1) * nh + j];
    }
  }

  CondensedCost c;
  c.hessian = MatrixXd::Zero(kInputDim * nh, kInputDim * nh);
  c.gradient = VectorXd::Zero(kInputDim * nh);
  const auto q = q_diag.asDiagonal();

#pragma omp parallel for schedule(dynamic) collapse(2)
  for (int i = 0; i < nh; ++i) {
    for (int j = 0; j < nh; ++j) {
      if (j < i) continue;
      Eigen::Matrix<double, kInputDim, kInputDim> block =
          Eigen::Matrix<double, kInputDim, kInputDim>::Zero();
      for (int k = j; k < nh; ++k) {
        block.noalias() += s_blocks[k * nh + i].transpose() * (q * s_blocks[k * nh + j]);
      }
      if (i == j) {
        block = (0.5 * (block + block.transpose())).eval();
        block.diagonal() += r_diag;
      }
      c.hessian.block<kInputDim, kInputDim>(kInputDim * i, kInputDim * j) = block;
      c.hessian.block<kInputDim, kInputDim>(kInputDim * j, kInputDim * i) = block.transpose();
    }
  }

#pragma omp parallel for schedule(static)
  for (int i = 0; i < nh; ++i) {
    InputVector g = InputVector::Zero();
    for (int k = i; k < nh; ++k) g.noalias() += s_blocks[k * nh + i].transpose() * (q * err[k]);
    c.gradient.segment<kInputDim>(kInputDim * i) = g;
  }
  return c;
}

}  // namespace thrustwalk
