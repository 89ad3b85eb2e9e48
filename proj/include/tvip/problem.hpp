#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tvip/types.hpp"

namespace tvip {

// A scalar field g(x,t) with its spatial derivatives. Time partials are
// optional; when absent they are estimated by central finite differences.
// A null hessian means the field is affine in x (zero Hessian); the barrier
// assembly skips those terms instead of materializing zero matrices.
struct ScalarField {
  std::function<double(const Vector&, double)> value;
  std::function<Vector(const Vector&, double)> gradient;
  std::function<Matrix(const Vector&, double)> hessian;        // null => zero
  std::function<double(const Vector&, double)> time_partial;   // df/dt
  std::function<Vector(const Vector&, double)> grad_time_partial;  // d/dt grad

  bool analytic_time_partials() const {
    return static_cast<bool>(time_partial) && static_cast<bool>(grad_time_partial);
  }
};

// Affine equality system A(t) x = b(t). Missing rate oracles default to
// zero (static constraint matrices).
struct AffineEquality {
  int rows = 0;
  std::function<Matrix(double)> matrix;      // q x n
  std::function<Vector(double)> rhs;         // q
  std::function<Matrix(double)> matrix_dot;  // null => zero
  std::function<Vector(double)> rhs_dot;     // null => zero
};

struct TimeVaryingProblem {
  int dimension = 0;                       // n
  ScalarField objective;                   // f0, strongly convex in x
  std::vector<ScalarField> inequalities;   // f_i <= 0
  std::optional<AffineEquality> equality;  // A(t) x = b(t)
  double strong_convexity = 1.0;           // declared m > 0

  int num_inequalities() const { return static_cast<int>(inequalities.size()); }
  int num_equalities() const { return equality ? equality->rows : 0; }
  void validate() const;  // throws std::invalid_argument on a broken invariant
};

// Every derivative of the problem at one (x, t) point. Immutable value,
// safe to hand across threads. hess_ineq entries of size 0x0 denote an
// identically zero Hessian.
struct DerivativeBundle {
  double f0 = 0.0;
  Vector grad_f0;
  Matrix hess_f0;
  Vector grad_t_f0;

  Vector f_ineq;                  // p
  std::vector<Vector> grads_ineq; // p x n
  std::vector<Matrix> hess_ineq;  // p x (n x n), 0x0 == zero
  Vector dt_ineq;                 // p, df_i/dt
  std::vector<Vector> grads_t_ineq;  // p x n, d/dt grad f_i

  Matrix eq_A;      // q x n
  Vector eq_b;      // q
  Matrix eq_A_dot;  // q x n
  Vector eq_b_dot;  // q

  int dimension() const { return static_cast<int>(grad_f0.size()); }
  int num_inequalities() const { return static_cast<int>(f_ineq.size()); }
  int num_equalities() const { return static_cast<int>(eq_b.size()); }
};

// Central-difference time partials of a scalar field: value derivative and
// the derivative of each gradient entry. Falls back to a forward difference
// when t < h so the field is never evaluated at negative time.
struct TimePartials {
  double dt_value = 0.0;
  Vector grad_t;
};
TimePartials fd_time_partials(const ScalarField& field, const Vector& x, double t,
                              double h = 1e-5);

DerivativeBundle eval_derivative_bundle(const TimeVaryingProblem& problem,
                                        const Vector& x, double t);

}  // namespace tvip
