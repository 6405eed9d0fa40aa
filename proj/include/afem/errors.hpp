#pragma once

#include <stdexcept>
#include <string>

namespace afem {

/// Malformed caller input (indices out of range, unreadable files).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid parameter combination in a run or marking configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Precondition of an operation violated by otherwise well-formed input.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Inconsistent or degenerate triangulation.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape regularity exceeded the configured cap during refinement.
class MeshQualityError : public MeshError {
 public:
  using MeshError::MeshError;
};

/// Mesh pair that does not descend from a common initial triangulation.
class IncompatibleMeshError : public MeshError {
 public:
  using MeshError::MeshError;
};

/// Non-finite samples of the problem data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Not enough usable data points for a least-squares rate.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace afem
