#pragma once

#include <utility>

#include "tvip/barrier.hpp"
#include "tvip/problem.hpp"
#include "tvip/types.hpp"

namespace tvip::dynamics {

struct GainSettings {
  double alpha = 5.0;         // correction gain
  double alpha0 = 1.0;        // robust gain numerator
  double epsilon = 1e-2;      // robust floor
  double gamma_filter = 1.0;  // low-pass filter gain
  double eta_bound = 0.0;     // prediction-error bound

  void validate_robust() const;  // requires alpha0 > eta_bound and epsilon > 0
};

// Primal-dual state z = [x; nu] for the equality-augmented dynamics.
struct KktState {
  Vector x;
  Vector nu;

  Vector packed() const;
  static KktState unpack(const Vector& z, int n);
};

// Filtered-gradient state of the second-order dynamics.
struct FilterState {
  Vector y;
};

// xdot = -hess^{-1} f0 [alpha grad f0 + grad_xt f0]
Vector unconstrained_field(const DerivativeBundle& bundle, double alpha,
                           Exec exec = Exec::Serial);

// zdot = -hess^{-1} L [alpha grad_z L + grad_zt L] with
// L = f0 + nu^T (A x - b).
Vector equality_field(const KktState& state, const DerivativeBundle& bundle,
                      double alpha, Exec exec = Exec::Serial);

// xdot = -hess^{-1} Phi [alpha grad Phi + d_ds sdot + d_dc cdot + d_dt]
Vector barrier_field(const PhiEvaluation& phi, const SchedulePoint& sched,
                     double alpha, Exec exec = Exec::Serial);

// Lagrangian form over z = [x; nu]: reduces to equality_field at p = 0 and
// to barrier_field at q = 0.
Vector combined_field(const KktState& state, const DerivativeBundle& bundle,
                      const PhiEvaluation& phi, const SchedulePoint& sched,
                      double alpha, Exec exec = Exec::Serial);

// xdot = -hess^{-1} Phi [alpha y + d_ds sdot + d_dc cdot + d_dt]
// ydot = -gamma y + alpha grad Phi
std::pair<Vector, Vector> second_order_field(const FilterState& filter,
                                             const PhiEvaluation& phi,
                                             const SchedulePoint& sched,
                                             const GainSettings& gains,
                                             Exec exec = Exec::Serial);

// alpha(x) = alpha0 / max(||grad Phi||, epsilon)
double adaptive_alpha(double grad_norm, const GainSettings& gains);

// barrier_field with d_dt replaced by a caller-supplied estimate and the
// state-dependent adaptive gain.
Vector robust_field(const PhiEvaluation& phi, const SchedulePoint& sched,
                    const Vector& noisy_d_dt, const GainSettings& gains,
                    Exec exec = Exec::Serial);

}  // namespace tvip::dynamics
