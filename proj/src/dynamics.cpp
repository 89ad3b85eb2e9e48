#include "tvip/dynamics.hpp"

#include <stdexcept>

#include "tvip/linalg.hpp"

namespace tvip::dynamics {

void GainSettings::validate_robust() const {
  if (!(alpha0 > eta_bound)) {
    throw std::invalid_argument("gains: robust mode requires alpha0 > eta_bound");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("gains: robust mode requires epsilon > 0");
  }
}

Vector KktState::packed() const {
  Vector z(x.size() + nu.size());
  z.head(x.size()) = x;
  z.tail(nu.size()) = nu;
  return z;
}

KktState KktState::unpack(const Vector& z, int n) {
  KktState state;
  state.x = z.head(n);
  state.nu = z.tail(z.size() - n);
  return state;
}

Vector unconstrained_field(const DerivativeBundle& bundle, double alpha, Exec exec) {
  const Vector rhs = alpha * bundle.grad_f0 + bundle.grad_t_f0;
  return -linalg::solve_spd(bundle.hess_f0, rhs, exec);
}

Vector equality_field(const KktState& state, const DerivativeBundle& bundle,
                      double alpha, Exec exec) {
  const int n = bundle.dimension();
  const int q = bundle.num_equalities();
  Vector grad_z(n + q);
  grad_z.head(n) = bundle.grad_f0 + bundle.eq_A.transpose() * state.nu;
  grad_z.tail(q) = bundle.eq_A * state.x - bundle.eq_b;
  Vector grad_zt(n + q);
  grad_zt.head(n) = bundle.grad_t_f0 + bundle.eq_A_dot.transpose() * state.nu;
  grad_zt.tail(q) = bundle.eq_A_dot * state.x - bundle.eq_b_dot;
  const Vector rhs = -(alpha * grad_z + grad_zt);
  return linalg::solve_kkt(bundle.hess_f0, bundle.eq_A, rhs, exec);
}

Vector barrier_field(const PhiEvaluation& phi, const SchedulePoint& sched,
                     double alpha, Exec exec) {
  const Vector rhs =
      alpha * phi.grad + phi.d_ds * sched.s_dot + phi.d_dc * sched.c_dot + phi.d_dt;
  return -linalg::solve_spd(phi.hess, rhs, exec);
}

Vector combined_field(const KktState& state, const DerivativeBundle& bundle,
                      const PhiEvaluation& phi, const SchedulePoint& sched,
                      double alpha, Exec exec) {
  const int n = bundle.dimension();
  const int q = bundle.num_equalities();
  if (q == 0) return barrier_field(phi, sched, alpha, exec);

  Vector grad_z(n + q);
  grad_z.head(n) = phi.grad + bundle.eq_A.transpose() * state.nu;
  grad_z.tail(q) = bundle.eq_A * state.x - bundle.eq_b;
  Vector drift(n + q);
  drift.head(n) = phi.d_ds * sched.s_dot + phi.d_dc * sched.c_dot + phi.d_dt +
                  bundle.eq_A_dot.transpose() * state.nu;
  drift.tail(q) = bundle.eq_A_dot * state.x - bundle.eq_b_dot;
  const Vector rhs = -(alpha * grad_z + drift);
  return linalg::solve_kkt(phi.hess, bundle.eq_A, rhs, exec);
}

std::pair<Vector, Vector> second_order_field(const FilterState& filter,
                                             const PhiEvaluation& phi,
                                             const SchedulePoint& sched,
                                             const GainSettings& gains, Exec exec) {
  const Vector rhs = gains.alpha * filter.y + phi.d_ds * sched.s_dot +
                     phi.d_dc * sched.c_dot + phi.d_dt;
  Vector x_dot = -linalg::solve_spd(phi.hess, rhs, exec);
  Vector y_dot = -gains.gamma_filter * filter.y + gains.alpha * phi.grad;
  return {std::move(x_dot), std::move(y_dot)};
}

double adaptive_alpha(double grad_norm, const GainSettings& gains) {
  return gains.alpha0 / std::max(grad_norm, gains.epsilon);
}

Vector robust_field(const PhiEvaluation& phi, const SchedulePoint& sched,
                    const Vector& noisy_d_dt, const GainSettings& gains, Exec exec) {
  const double alpha = adaptive_alpha(phi.grad.norm(), gains);
  const Vector rhs =
      alpha * phi.grad + phi.d_ds * sched.s_dot + phi.d_dc * sched.c_dot + noisy_d_dt;
  return -linalg::solve_spd(phi.hess, rhs, exec);
}

}  // namespace tvip::dynamics
