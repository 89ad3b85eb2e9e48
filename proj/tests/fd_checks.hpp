#pragma once

// Finite-difference oracles for the barrier partial derivatives. These stay
// independent of eval_phi: values and gradients come straight from the
// problem oracles.

#include <cmath>
#include <random>

#include "tvip/barrier.hpp"
#include "tvip/problem.hpp"

namespace tvip::testing {

inline double phi_value_at(const TimeVaryingProblem& problem, const Vector& x,
                           double t, double c, double s) {
  double value = problem.objective.value(x, t);
  for (const ScalarField& fi : problem.inequalities) {
    value -= std::log(s - fi.value(x, t)) / c;
  }
  return value;
}

inline Vector phi_grad_at(const TimeVaryingProblem& problem, const Vector& x,
                          double t, double c, double s) {
  Vector grad = problem.objective.gradient(x, t);
  for (const ScalarField& fi : problem.inequalities) {
    const double psi = s - fi.value(x, t);
    grad += fi.gradient(x, t) / (c * psi);
  }
  return grad;
}

// Worst relative mismatch between eval_phi's analytic partials and central
// finite differences at one interior point. Directions for the x checks are
// coordinate axes for small n, random unit vectors otherwise.
inline double phi_partials_worst_error(const TimeVaryingProblem& problem,
                                       const Vector& x, double t, double c,
                                       double s, std::mt19937_64& rng) {
  const double h = 1e-5;
  const DerivativeBundle bundle = eval_derivative_bundle(problem, x, t);
  const SchedulePoint sched{c, 0.0, s, 0.0};
  const PhiEvaluation phi = eval_phi(bundle, sched);
  const int n = problem.dimension;

  double worst = 0.0;
  auto rel = [](double diff, double scale) { return diff / (1.0 + scale); };

  std::vector<Vector> directions;
  if (n <= 8) {
    for (int i = 0; i < n; ++i) directions.push_back(Vector::Unit(n, i));
  } else {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int d = 0; d < 3; ++d) {
      Vector v(n);
      for (int i = 0; i < n; ++i) v(i) = gauss(rng);
      directions.push_back(v.normalized());
    }
  }

  for (const Vector& v : directions) {
    // gradient against phi values
    const double fd_dir = (phi_value_at(problem, x + h * v, t, c, s) -
                           phi_value_at(problem, x - h * v, t, c, s)) /
                          (2.0 * h);
    worst = std::max(worst, std::abs(rel(fd_dir - phi.grad.dot(v),
                                         std::abs(phi.grad.dot(v)))));
    // hessian against gradient values
    const Vector fd_hv = (phi_grad_at(problem, x + h * v, t, c, s) -
                          phi_grad_at(problem, x - h * v, t, c, s)) /
                         (2.0 * h);
    const Vector hv = phi.hess * v;
    worst = std::max(worst, rel((fd_hv - hv).norm(), hv.norm()));
  }

  const Vector fd_ds =
      (phi_grad_at(problem, x, t, c, s + h) - phi_grad_at(problem, x, t, c, s - h)) /
      (2.0 * h);
  worst = std::max(worst, rel((fd_ds - phi.d_ds).norm(), phi.d_ds.norm()));

  const double hc = 1e-5 * c;
  const Vector fd_dc =
      (phi_grad_at(problem, x, t, c + hc, s) - phi_grad_at(problem, x, t, c - hc, s)) /
      (2.0 * hc);
  worst = std::max(worst, rel((fd_dc - phi.d_dc).norm(), phi.d_dc.norm()));

  const Vector fd_dt =
      (phi_grad_at(problem, x, t + h, c, s) - phi_grad_at(problem, x, t - h, c, s)) /
      (2.0 * h);
  worst = std::max(worst, rel((fd_dt - phi.d_dt).norm(), phi.d_dt.norm()));
  return worst;
}

}  // namespace tvip::testing
