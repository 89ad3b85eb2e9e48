#include "tvip/barrier.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tvip/linalg.hpp"

namespace tvip {

void BarrierSchedules::validate() const {
  if (!(c0 > 0.0)) throw std::invalid_argument("schedules: c0 must be positive");
  if (gamma_c < 0.0) throw std::invalid_argument("schedules: gamma_c must be >= 0");
  if (gamma_s < 0.0) throw std::invalid_argument("schedules: gamma_s must be >= 0");
  if (s0 && *s0 < 0.0) throw std::invalid_argument("schedules: s0 must be >= 0");
  if (!(c_cap > 0.0)) throw std::invalid_argument("schedules: c_cap must be positive");
}

SchedulePoint eval_schedules(const BarrierSchedules& sched, double t) {
  if (t < 0.0) throw std::invalid_argument("eval_schedules: t must be >= 0");
  SchedulePoint point;
  const double c_raw = sched.c0 * std::exp(sched.gamma_c * t);
  if (c_raw < sched.c_cap) {
    point.c = c_raw;
    point.c_dot = sched.gamma_c * c_raw;
  } else {
    point.c = sched.c_cap;
    point.c_dot = 0.0;
  }
  const double s0 = sched.s0.value_or(0.0);
  point.s = s0 * std::exp(-sched.gamma_s * t);
  point.s_dot = -sched.gamma_s * point.s;
  return point;
}

PhiEvaluation eval_phi(const DerivativeBundle& bundle, const SchedulePoint& sched,
                       Exec exec) {
  const int n = bundle.dimension();
  const int p = bundle.num_inequalities();
  const double c = sched.c;
  if (!(c > 0.0)) throw std::invalid_argument("eval_phi: barrier parameter must be positive");

  PhiEvaluation out;
  out.residuals.resize(p);
  for (int i = 0; i < p; ++i) {
    const double psi = sched.s - bundle.f_ineq(i);
    if (!(psi > 0.0)) {
      throw DomainViolation(i, "eval_phi: residual " + std::to_string(i) +
                                   " is not strictly positive (psi=" +
                                   std::to_string(psi) + ")");
    }
    out.residuals(i) = psi;
  }

  out.phi = bundle.f0;
  out.grad = bundle.grad_f0;
  out.hess = bundle.hess_f0;
  out.d_ds = Vector::Zero(n);
  out.d_dc = Vector::Zero(n);
  out.d_dt = bundle.grad_t_f0;
  if (p == 0) return out;

  const double inv_c = 1.0 / c;
  double log_sum = 0.0;
  // row i of scaled holds grad f_i / (sqrt(c) psi_i), so hess gains
  // (1/c) sum_i g_i g_i^T / psi_i^2 in one rank-p update.
  Matrix scaled(p, n);
  const double inv_sqrt_c = std::sqrt(inv_c);
  for (int i = 0; i < p; ++i) {
    const double psi = out.residuals(i);
    const Vector& gi = bundle.grads_ineq[i];
    log_sum += std::log(psi);
    out.grad += (inv_c / psi) * gi;
    out.d_ds -= (inv_c / (psi * psi)) * gi;
    out.d_dc -= (inv_c * inv_c / psi) * gi;
    out.d_dt += (inv_c / psi) * bundle.grads_t_ineq[i] +
                (inv_c * bundle.dt_ineq(i) / (psi * psi)) * gi;
    if (bundle.hess_ineq[i].size() > 0) {
      out.hess += (inv_c / psi) * bundle.hess_ineq[i];
    }
    scaled.row(i) = (inv_sqrt_c / psi) * gi.transpose();
  }
  out.phi -= inv_c * log_sum;
  linalg::syrk_add(out.hess, scaled, exec);
  return out;
}

DualEstimate estimate_duals(const Vector& residuals, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("estimate_duals: c must be positive");
  DualEstimate duals;
  duals.lambdas.resize(residuals.size());
  for (Eigen::Index i = 0; i < residuals.size(); ++i) {
    if (!(residuals(i) > 0.0)) {
      throw DomainViolation(static_cast<int>(i),
                            "estimate_duals: residual not strictly positive");
    }
    duals.lambdas(i) = 1.0 / (c * residuals(i));
  }
  return duals;
}

double suboptimality_bound(int p, double c, const Vector& lambdas, double s) {
  if (!(c > 0.0)) throw std::invalid_argument("suboptimality_bound: c must be positive");
  double bound = static_cast<double>(p) / c;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) bound += lambdas(i) * s;
  return bound;
}

}  // namespace tvip
