#pragma once

#include <array>

#include <Eigen/Dense>

namespace thrustwalk {

using Eigen::Matrix3d;
using Eigen::Vector3d;

inline constexpr int kNumLegs = 4;
inline constexpr int kStateDim = 13;  // theta, p, omega, pdot, constant 1
inline constexpr int kInputDim = 16;  // 4 x GRF(3) + 4 x thrust

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using InputVector = Eigen::Matrix<double, kInputDim, 1>;
using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using InputMatrix = Eigen::Matrix<double, kStateDim, kInputDim>;

// Leg order used everywhere: FL, FR, RL, RR. Trot pairs are (FL, RR) and (FR, RL).
enum class Leg : int { kFrontLeft = 0, kFrontRight = 1, kRearLeft = 2, kRearRight = 3 };

constexpr bool is_left_leg(int leg) { return leg == 0 || leg == 2; }
constexpr double side_sign(int leg) { return is_left_leg(leg) ? 1.0 : -1.0; }

template <typename T>
using PerLeg = std::array<T, kNumLegs>;

using ContactFlags = PerLeg<bool>;

}  // namespace thrustwalk
