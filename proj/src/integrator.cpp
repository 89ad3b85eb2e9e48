#include "tvip/integrator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tvip/linalg.hpp"
#include "tvip/log.hpp"

namespace tvip {

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::Unconstrained: return "unconstrained";
    case Mode::Equality: return "equality";
    case Mode::Barrier: return "barrier";
    case Mode::Combined: return "combined";
    case Mode::SecondOrder: return "second_order";
    case Mode::Robust: return "robust";
  }
  return "unknown";
}

void IntegratorConfig::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("integrator: tau must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("integrator: t_end must be positive");
  if (tau > t_end) throw std::invalid_argument("integrator: tau must not exceed t_end");
  if (!(guard_shrink > 0.0 && guard_shrink < 1.0)) {
    throw std::invalid_argument("integrator: guard_shrink must lie in (0,1)");
  }
  if (max_backtracks < 1) {
    throw std::invalid_argument("integrator: max_backtracks must be >= 1");
  }
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) {
    throw std::invalid_argument("integrator: armijo_c must lie in (0,1)");
  }
}

double Trajectory::min_psi() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const TrajectorySample& s : samples) {
    if (s.psi.size() > 0) lo = std::min(lo, s.psi.minCoeff());
  }
  return lo;
}

Vector euler_step(const Vector& field_value, const Vector& state, double tau) {
  return state + tau * field_value;
}

GuardResult feasibility_guard(const Vector& prev, const Vector& candidate,
                              const TimeVaryingProblem& problem, double s_next,
                              double t_next, const IntegratorConfig& config) {
  const Vector offset = candidate - prev;
  double scale = 1.0;
  for (int k = 0; k <= config.max_backtracks; ++k) {
    const Vector trial = prev + scale * offset;
    bool interior = true;
    for (const ScalarField& fi : problem.inequalities) {
      if (!(fi.value(trial, t_next) < s_next)) {
        interior = false;
        break;
      }
    }
    if (interior) {
      if (k > 0) TVIP_LOG_DEBUG("guard: %d backtracks at t=%g", k, t_next);
      return {trial, k};
    }
    scale *= config.guard_shrink;
  }
  throw StepFailure("feasibility guard exhausted " +
                    std::to_string(config.max_backtracks) +
                    " backtracks at t=" + std::to_string(t_next) +
                    "; step size too large for boundary proximity");
}

namespace {

bool barrier_family(Mode mode) {
  return mode == Mode::Barrier || mode == Mode::Combined ||
         mode == Mode::SecondOrder || mode == Mode::Robust;
}

// Everything the fields and the recorder need at one (state, t) point.
struct StepEval {
  DerivativeBundle bundle;
  SchedulePoint sched;
  PhiEvaluation phi;  // barrier-family modes only
  double grad_norm = 0.0;
};

struct LoopState {
  Vector x;
  Vector nu;
  Vector y;
};

StepEval evaluate(const TimeVaryingProblem& problem, Mode mode,
                  const BarrierSchedules& schedules, const LoopState& state,
                  double t, Exec exec) {
  StepEval ev;
  ev.bundle = eval_derivative_bundle(problem, state.x, t);
  ev.sched = eval_schedules(schedules, t);
  switch (mode) {
    case Mode::Unconstrained:
      ev.grad_norm = ev.bundle.grad_f0.norm();
      break;
    case Mode::Equality: {
      const int n = problem.dimension;
      const int q = problem.num_equalities();
      Vector grad_z(n + q);
      grad_z.head(n) = ev.bundle.grad_f0 + ev.bundle.eq_A.transpose() * state.nu;
      grad_z.tail(q) = ev.bundle.eq_A * state.x - ev.bundle.eq_b;
      ev.grad_norm = grad_z.norm();
      break;
    }
    case Mode::Barrier:
    case Mode::SecondOrder:
    case Mode::Robust:
      ev.phi = eval_phi(ev.bundle, ev.sched, exec);
      ev.grad_norm = ev.phi.grad.norm();
      break;
    case Mode::Combined: {
      ev.phi = eval_phi(ev.bundle, ev.sched, exec);
      const int n = problem.dimension;
      const int q = problem.num_equalities();
      Vector grad_z(n + q);
      grad_z.head(n) = ev.phi.grad + ev.bundle.eq_A.transpose() * state.nu;
      grad_z.tail(q) = ev.bundle.eq_A * state.x - ev.bundle.eq_b;
      ev.grad_norm = grad_z.norm();
      break;
    }
  }
  return ev;
}

TrajectorySample make_sample(Mode mode, const LoopState& state, const StepEval& ev,
                             double t, int backtracks) {
  TrajectorySample sample;
  sample.t = t;
  sample.x = state.x;
  sample.nu = state.nu;
  sample.y = state.y;
  sample.c = ev.sched.c;
  sample.s = ev.sched.s;
  sample.grad_norm = ev.grad_norm;
  sample.guard_backtracks = backtracks;
  if (barrier_family(mode) && ev.phi.residuals.size() > 0) {
    sample.psi = ev.phi.residuals;
    sample.lambda_hat = estimate_duals(ev.phi.residuals, ev.sched.c).lambdas;
  }
  return sample;
}

// Correction and prediction components of the step direction so the optional
// line search can damp the correction alone.
struct FieldSplit {
  Vector total;
  Vector correction;
};

FieldSplit compute_field(const TimeVaryingProblem& problem, Mode mode,
                         const dynamics::GainSettings& gains, const StepEval& ev,
                         const LoopState& state, const PredictionEstimator& estimator,
                         double t, Exec exec) {
  FieldSplit split;
  switch (mode) {
    case Mode::Unconstrained: {
      split.total = dynamics::unconstrained_field(ev.bundle, gains.alpha, exec);
      split.correction =
          -gains.alpha * linalg::solve_spd(ev.bundle.hess_f0, ev.bundle.grad_f0, exec);
      break;
    }
    case Mode::Equality: {
      dynamics::KktState z{state.x, state.nu};
      split.total = dynamics::equality_field(z, ev.bundle, gains.alpha, exec);
      const int n = problem.dimension;
      const int q = problem.num_equalities();
      Vector grad_z(n + q);
      grad_z.head(n) = ev.bundle.grad_f0 + ev.bundle.eq_A.transpose() * state.nu;
      grad_z.tail(q) = ev.bundle.eq_A * state.x - ev.bundle.eq_b;
      split.correction = -gains.alpha * linalg::solve_kkt(ev.bundle.hess_f0,
                                                          ev.bundle.eq_A, grad_z, exec);
      break;
    }
    case Mode::Barrier: {
      split.total = dynamics::barrier_field(ev.phi, ev.sched, gains.alpha, exec);
      split.correction = -gains.alpha * linalg::solve_spd(ev.phi.hess, ev.phi.grad, exec);
      break;
    }
    case Mode::Combined: {
      dynamics::KktState z{state.x, state.nu};
      split.total = dynamics::combined_field(z, ev.bundle, ev.phi, ev.sched,
                                             gains.alpha, exec);
      split.correction = Vector::Zero(split.total.size());
      break;
    }
    case Mode::SecondOrder: {
      dynamics::FilterState filter{state.y};
      auto [x_dot, y_dot] =
          dynamics::second_order_field(filter, ev.phi, ev.sched, gains, exec);
      split.total.resize(x_dot.size() + y_dot.size());
      split.total.head(x_dot.size()) = x_dot;
      split.total.tail(y_dot.size()) = y_dot;
      split.correction = Vector::Zero(split.total.size());
      break;
    }
    case Mode::Robust: {
      Vector estimate = estimator ? estimator(t, ev.phi.d_dt) : ev.phi.d_dt;
      split.total = dynamics::robust_field(ev.phi, ev.sched, estimate, gains, exec);
      split.correction = Vector::Zero(split.total.size());
      break;
    }
  }
  return split;
}

LoopState unpack_state(Mode mode, const Vector& packed, int n, int q) {
  LoopState state;
  switch (mode) {
    case Mode::Unconstrained:
    case Mode::Barrier:
    case Mode::Robust:
      state.x = packed;
      break;
    case Mode::Equality:
    case Mode::Combined:
      state.x = packed.head(n);
      state.nu = packed.tail(q);
      break;
    case Mode::SecondOrder:
      state.x = packed.head(n);
      state.y = packed.tail(packed.size() - n);
      break;
  }
  return state;
}

Vector pack_state(Mode mode, const LoopState& state) {
  switch (mode) {
    case Mode::Unconstrained:
    case Mode::Barrier:
    case Mode::Robust:
      return state.x;
    case Mode::Equality:
    case Mode::Combined: {
      Vector z(state.x.size() + state.nu.size());
      z.head(state.x.size()) = state.x;
      z.tail(state.nu.size()) = state.nu;
      return z;
    }
    case Mode::SecondOrder: {
      Vector z(state.x.size() + state.y.size());
      z.head(state.x.size()) = state.x;
      z.tail(state.y.size()) = state.y;
      return z;
    }
  }
  return state.x;
}

}  // namespace

double fit_log_slope(const std::vector<double>& times,
                     const std::vector<double>& values) {
  double st = 0.0, sv = 0.0, stt = 0.0, stv = 0.0;
  int count = 0;
  for (size_t i = 0; i < times.size() && i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) continue;
    const double lv = std::log(values[i]);
    st += times[i];
    sv += lv;
    stt += times[i] * times[i];
    stv += times[i] * lv;
    ++count;
  }
  if (count < 2) throw std::invalid_argument("fit_log_slope: need two positive samples");
  const double denom = count * stt - st * st;
  return (count * stv - st * sv) / denom;
}

Trajectory integrate(const TimeVaryingProblem& problem, Mode mode,
                     const dynamics::GainSettings& gains,
                     const BarrierSchedules& schedules_in,
                     const IntegratorConfig& config, const InitialState& init,
                     const PredictionEstimator& estimator) {
  problem.validate();
  config.validate();
  schedules_in.validate();
  if (mode == Mode::Robust) gains.validate_robust();

  const int n = problem.dimension;
  const int q = problem.num_equalities();
  if (init.x.size() != n) {
    throw std::invalid_argument("integrate: initial state has wrong dimension");
  }
  if ((mode == Mode::Equality || mode == Mode::Combined) && q == 0) {
    throw std::invalid_argument("integrate: mode needs an equality block");
  }

  LoopState state;
  state.x = init.x;
  if (mode == Mode::Equality || mode == Mode::Combined) {
    state.nu = init.nu.size() == q ? init.nu : Vector::Zero(q);
  }
  if (mode == Mode::SecondOrder) {
    state.y = init.y.size() == n ? init.y : Vector::Zero(n);
  }

  BarrierSchedules schedules = schedules_in;
  if (barrier_family(mode) && !schedules.s0.has_value()) {
    double worst = 0.0;
    for (const ScalarField& fi : problem.inequalities) {
      worst = std::max(worst, fi.value(init.x, 0.0));
    }
    schedules.s0 = std::max(0.0, worst) + 1.0;
    TVIP_LOG_INFO("integrate: auto slack s0=%g", *schedules.s0);
  }

  Trajectory traj;
  const long steps = static_cast<long>(std::ceil(config.t_end / config.tau - 1e-12));
  traj.samples.reserve(static_cast<size_t>(steps) + 1);

  try {
    StepEval ev = evaluate(problem, mode, schedules, state, 0.0, config.exec);
    traj.samples.push_back(make_sample(mode, state, ev, 0.0, 0));

    for (long k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * config.tau;
      const double t_next = std::min(config.t_end, t + config.tau);
      const double tau_k = t_next - t;

      FieldSplit field;
      Vector packed = pack_state(mode, state);
      if (config.use_rk4) {
        // classical Runge-Kutta for accuracy studies; excluded from presets
        auto field_at = [&](const Vector& z, double tz) {
          LoopState sz = unpack_state(mode, z, n, q);
          StepEval evz = evaluate(problem, mode, schedules, sz, tz, config.exec);
          return compute_field(problem, mode, gains, evz, sz, estimator, tz,
                               config.exec)
              .total;
        };
        const Vector k1 = field_at(packed, t);
        const Vector k2 = field_at(packed + 0.5 * tau_k * k1, t + 0.5 * tau_k);
        const Vector k3 = field_at(packed + 0.5 * tau_k * k2, t + 0.5 * tau_k);
        const Vector k4 = field_at(packed + tau_k * k3, t_next);
        field.total = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        field.correction = Vector::Zero(field.total.size());
      } else {
        field = compute_field(problem, mode, gains, ev, state, estimator, t,
                              config.exec);
      }

      const SchedulePoint sched_next = eval_schedules(schedules, t_next);
      int backtracks = 0;
      LoopState next;
      StepEval ev_next;

      auto advance = [&](double damping) {
        Vector direction = field.total;
        if (damping != 1.0) {
          direction = field.total + (damping - 1.0) * field.correction;
        }
        Vector candidate = euler_step(direction, packed, tau_k);
        next = unpack_state(mode, candidate, n, q);
        if (barrier_family(mode) && problem.num_inequalities() > 0) {
          Vector prev_x = state.x;
          GuardResult guarded = feasibility_guard(prev_x, next.x, problem,
                                                  sched_next.s, t_next, config);
          backtracks = guarded.backtracks;
          next.x = guarded.state;
        }
        ev_next = evaluate(problem, mode, schedules, next, t_next, config.exec);
      };

      if (config.line_search && !config.use_rk4) {
        // Armijo on the gradient norm, damping only the correction part.
        double damping = 1.0;
        int tries = 0;
        for (;;) {
          advance(damping);
          const double target =
              ev.grad_norm *
              (1.0 - config.armijo_c * damping * gains.alpha * tau_k);
          if (ev_next.grad_norm <= target || tries >= config.max_backtracks) break;
          damping *= 0.5;
          ++tries;
        }
      } else {
        advance(1.0);
      }

      state = next;
      ev = ev_next;
      traj.samples.push_back(make_sample(mode, state, ev, t_next, backtracks));
    }
  } catch (const SingularSystem& e) {
    traj.error = std::string("SingularSystem: ") + e.what();
  } catch (const DomainViolation& e) {
    traj.error = std::string("DomainViolation: ") + e.what();
  } catch (const StepFailure& e) {
    traj.error = std::string("StepFailure: ") + e.what();
  } catch (const EvalError& e) {
    traj.error = std::string("EvalError: ") + e.what();
  }
  return traj;
}

}  // namespace tvip
