#pragma once

#include <stdexcept>
#include <string>

#include "thrustwalk/types.hpp"

namespace thrustwalk {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Damped-least-squares IK failed to reach the target. Carries the best pose found.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, Vector3d best_q, double residual, int iterations)
      : Error(what), best_q_(best_q), residual_(residual), iterations_(iterations) {}

  const Vector3d& best_q() const { return best_q_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  Vector3d best_q_;
  double residual_;
  int iterations_;
};

class GimbalLock : public Error {
 public:
  using Error::Error;
};

class PhaseOutOfRange : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace thrustwalk
