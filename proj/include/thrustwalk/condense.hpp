#pragma once

#include <span>

#include <Eigen/Dense>

#include "thrustwalk/centroidal_dynamics.hpp"

namespace thrustwalk {

/// Dense cost over the stacked input sequence U = [u_0; ...; u_{n-1}]:
///   1/2 U'HU + g'U  ==  1/2 sum_k (x_k - r_k)'Q(x_k - r_k) + u_k'R u_k  + const.
struct CondensedCost {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
};

/// Predicted states X = T x0 + S U for X = [x_1; ...; x_n].
struct PredictionMatrices {
  Eigen::MatrixXd T;  // 13n x 13
  Eigen::MatrixXd S;  // 13n x 16n, block lower triangular
};

PredictionMatrices build_prediction_matrices(std::span<const LinearModel> models);

/// Serial reference: forms S explicitly and multiplies densely.
CondensedCost condense_reference(std::span<const LinearModel> models, const StateVector& x0,
                                 std::span<const StateVector> x_ref, const StateVector& q_diag,
                                 const InputVector& r_diag);

/// Block kernel: propagates the S blocks once, then fills Hessian blocks and gradient
/// segments in parallel. Matches condense_reference to rounding.
CondensedCost condense(std::span<const LinearModel> models, const StateVector& x0,
                       std::span<const StateVector> x_ref, const StateVector& q_diag,
                       const InputVector& r_diag);

}  // namespace thrustwalk
