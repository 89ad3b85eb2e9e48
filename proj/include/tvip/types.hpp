#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace tvip {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vector2 = Eigen::Vector2d;

// Execution policy for the dense kernels. Serial is the reference path;
// Parallel uses OpenMP with a loop order that keeps per-entry accumulation
// deterministic for a fixed policy.
enum class Exec { Serial, Parallel };

// ---------- error types ----------

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-positive pivot in a symmetric factorization or a zero pivot in LU.
struct SingularSystem : SolverError {
  int pivot_index;
  explicit SingularSystem(int pivot, const std::string& what)
      : SolverError(what), pivot_index(pivot) {}
};

// A barrier residual s - f_i(x,t) was evaluated at or below zero.
struct DomainViolation : SolverError {
  int constraint_index;
  explicit DomainViolation(int index, const std::string& what)
      : SolverError(what), constraint_index(index) {}
};

// An oracle returned a non-finite value. Index convention:
// -1 objective, 0..p-1 inequality constraints, -2 equality system.
struct EvalError : SolverError {
  int oracle_index;
  explicit EvalError(int index, const std::string& what)
      : SolverError(what), oracle_index(index) {}
};

// Feasibility guard exhausted its backtracks: step size too large for the
// current boundary proximity.
struct StepFailure : SolverError {
  using SolverError::SolverError;
};

struct OracleFailure : SolverError {
  using SolverError::SolverError;
};

struct GeometryError : SolverError {
  int obstacle_index;
  explicit GeometryError(int index, const std::string& what)
      : SolverError(what), obstacle_index(index) {}
};

}  // namespace tvip
