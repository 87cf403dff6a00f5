#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace swipt {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class Architecture { Ideal, TimeSwitching, PowerSplitting };

std::string_view to_string(Architecture arch);
Architecture architecture_from_string(std::string_view name);

// Error hierarchy. Every failure the library reports is one of these.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A constraint of the model cannot be met (min-rate power, RF delivery,
/// all-erased TS receiver, ...). `constraint()` names the violated one.
class Infeasible : public Error {
 public:
  Infeasible(std::string constraint, const std::string& what)
      : Error(what), constraint_(std::move(constraint)) {}
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

/// Raised when the per-state Lagrangian is unbounded, i.e. some layer's
/// effective price lambda - theta*eta*h is not positive.
class UnboundedObjective : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace swipt
