#pragma once

#include <optional>

#include "tvip/problem.hpp"
#include "tvip/types.hpp"

namespace tvip {

// Exponential schedules  c(t) = c0 e^{gamma_c t}  (capped at c_cap) and
// s(t) = s0 e^{-gamma_s t}. A missing s0 is resolved at integration start
// from the initial constraint values.
struct BarrierSchedules {
  double c0 = 10.0;
  double gamma_c = 1.0;
  std::optional<double> s0;  // nullopt => max(0, max_i f_i(x0, 0)) + 1
  double gamma_s = 5.0;
  double c_cap = 1e12;

  void validate() const;
};

// Point values of the schedules and their time derivatives. c_dot is zero
// once the cap is reached.
struct SchedulePoint {
  double c = 0.0;
  double c_dot = 0.0;
  double s = 0.0;
  double s_dot = 0.0;
};

SchedulePoint eval_schedules(const BarrierSchedules& sched, double t);

// The augmented objective Phi(x,c,s,t) = f0 - (1/c) sum_i log(s - f_i) and
// all partial derivatives of its gradient.
struct PhiEvaluation {
  double phi = 0.0;
  Vector residuals;  // psi_i = s - f_i(x,t), all strictly positive
  Vector grad;       // grad_x Phi
  Matrix hess;       // grad_xx Phi
  Vector d_ds;       // grad_xs Phi
  Vector d_dc;       // grad_xc Phi
  Vector d_dt;       // grad_xt Phi
};

// Throws DomainViolation with the offending constraint index when any
// residual is non-positive.
PhiEvaluation eval_phi(const DerivativeBundle& bundle, const SchedulePoint& sched,
                       Exec exec = Exec::Serial);

// Central-path multiplier estimates lambda_i = 1 / (c psi_i).
struct DualEstimate {
  Vector lambdas;
};
DualEstimate estimate_duals(const Vector& residuals, double c);

// p/c + sum_i lambda_i s: bound on |f0(xhat*) - f0(x*)|.
double suboptimality_bound(int p, double c, const Vector& lambdas, double s);

}  // namespace tvip
