#include "tvip/problem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tvip {

namespace {

void check_finite_scalar(double v, int oracle_index, const char* what) {
  if (!std::isfinite(v)) {
    throw EvalError(oracle_index, std::string(what) + " returned a non-finite value");
  }
}

void check_finite_vec(const Vector& v, int oracle_index, const char* what) {
  if (!v.allFinite()) {
    throw EvalError(oracle_index, std::string(what) + " returned a non-finite value");
  }
}

void check_finite_mat(const Matrix& m, int oracle_index, const char* what) {
  if (!m.allFinite()) {
    throw EvalError(oracle_index, std::string(what) + " returned a non-finite value");
  }
}

}  // namespace

void TimeVaryingProblem::validate() const {
  if (dimension < 1) throw std::invalid_argument("problem: dimension must be >= 1");
  if (strong_convexity <= 0.0) {
    throw std::invalid_argument("problem: strong convexity modulus must be positive");
  }
  if (!objective.value || !objective.gradient) {
    throw std::invalid_argument("problem: objective value/gradient oracles required");
  }
  for (const ScalarField& f : inequalities) {
    if (!f.value || !f.gradient) {
      throw std::invalid_argument("problem: constraint value/gradient oracles required");
    }
  }
  if (equality) {
    if (equality->rows >= dimension) {
      throw std::invalid_argument("problem: needs q < n for equality constraints");
    }
    if (!equality->matrix || !equality->rhs) {
      throw std::invalid_argument("problem: equality matrix/rhs oracles required");
    }
  }
}

TimePartials fd_time_partials(const ScalarField& field, const Vector& x, double t,
                              double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_time_partials: h must be positive");
  TimePartials out;
  if (t >= h) {
    const double vp = field.value(x, t + h);
    const double vm = field.value(x, t - h);
    check_finite_scalar(vp, -1, "fd oracle");
    check_finite_scalar(vm, -1, "fd oracle");
    out.dt_value = (vp - vm) / (2.0 * h);
    const Vector gp = field.gradient(x, t + h);
    const Vector gm = field.gradient(x, t - h);
    check_finite_vec(gp, -1, "fd oracle gradient");
    check_finite_vec(gm, -1, "fd oracle gradient");
    out.grad_t = (gp - gm) / (2.0 * h);
  } else {
    // forward difference keeps evaluations at t >= 0
    const double vp = field.value(x, t + h);
    const double v0 = field.value(x, t);
    check_finite_scalar(vp, -1, "fd oracle");
    check_finite_scalar(v0, -1, "fd oracle");
    out.dt_value = (vp - v0) / h;
    const Vector gp = field.gradient(x, t + h);
    const Vector g0 = field.gradient(x, t);
    check_finite_vec(gp, -1, "fd oracle gradient");
    check_finite_vec(g0, -1, "fd oracle gradient");
    out.grad_t = (gp - g0) / h;
  }
  return out;
}

DerivativeBundle eval_derivative_bundle(const TimeVaryingProblem& problem,
                                        const Vector& x, double t) {
  if (t < 0.0) throw std::invalid_argument("eval_derivative_bundle: t must be >= 0");
  if (!x.allFinite()) throw std::invalid_argument("eval_derivative_bundle: x not finite");

  DerivativeBundle bundle;
  const int n = problem.dimension;
  const int p = problem.num_inequalities();

  const ScalarField& f0 = problem.objective;
  bundle.f0 = f0.value(x, t);
  check_finite_scalar(bundle.f0, -1, "objective");
  bundle.grad_f0 = f0.gradient(x, t);
  check_finite_vec(bundle.grad_f0, -1, "objective gradient");
  bundle.hess_f0 = f0.hessian ? f0.hessian(x, t) : Matrix::Zero(n, n);
  check_finite_mat(bundle.hess_f0, -1, "objective hessian");
  if (f0.analytic_time_partials()) {
    bundle.grad_t_f0 = f0.grad_time_partial(x, t);
    check_finite_vec(bundle.grad_t_f0, -1, "objective time partial");
  } else {
    bundle.grad_t_f0 = fd_time_partials(f0, x, t).grad_t;
  }

  bundle.f_ineq.resize(p);
  bundle.dt_ineq.resize(p);
  bundle.grads_ineq.resize(p);
  bundle.hess_ineq.resize(p);
  bundle.grads_t_ineq.resize(p);
  for (int i = 0; i < p; ++i) {
    const ScalarField& fi = problem.inequalities[i];
    bundle.f_ineq(i) = fi.value(x, t);
    check_finite_scalar(bundle.f_ineq(i), i, "constraint");
    bundle.grads_ineq[i] = fi.gradient(x, t);
    check_finite_vec(bundle.grads_ineq[i], i, "constraint gradient");
    if (fi.hessian) {
      bundle.hess_ineq[i] = fi.hessian(x, t);
      check_finite_mat(bundle.hess_ineq[i], i, "constraint hessian");
    } else {
      bundle.hess_ineq[i] = Matrix();  // 0x0 == identically zero
    }
    if (fi.analytic_time_partials()) {
      bundle.dt_ineq(i) = fi.time_partial(x, t);
      check_finite_scalar(bundle.dt_ineq(i), i, "constraint time partial");
      bundle.grads_t_ineq[i] = fi.grad_time_partial(x, t);
      check_finite_vec(bundle.grads_t_ineq[i], i, "constraint time partial");
    } else {
      const TimePartials fd = fd_time_partials(fi, x, t);
      bundle.dt_ineq(i) = fd.dt_value;
      bundle.grads_t_ineq[i] = fd.grad_t;
    }
  }

  if (problem.equality) {
    const AffineEquality& eq = *problem.equality;
    bundle.eq_A = eq.matrix(t);
    bundle.eq_b = eq.rhs(t);
    check_finite_mat(bundle.eq_A, -2, "equality matrix");
    check_finite_vec(bundle.eq_b, -2, "equality rhs");
    bundle.eq_A_dot = eq.matrix_dot ? eq.matrix_dot(t)
                                    : Matrix::Zero(bundle.eq_A.rows(), bundle.eq_A.cols());
    bundle.eq_b_dot = eq.rhs_dot ? eq.rhs_dot(t) : Vector::Zero(bundle.eq_b.size());
    check_finite_mat(bundle.eq_A_dot, -2, "equality matrix rate");
    check_finite_vec(bundle.eq_b_dot, -2, "equality rhs rate");
  } else {
    bundle.eq_A = Matrix::Zero(0, n);
    bundle.eq_b = Vector::Zero(0);
    bundle.eq_A_dot = Matrix::Zero(0, n);
    bundle.eq_b_dot = Vector::Zero(0);
  }
  return bundle;
}

}  // namespace tvip
