#include "tvip/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>

#include "tvip/barrier.hpp"
#include "tvip/dynamics.hpp"
#include "tvip/linalg.hpp"
#include "tvip/log.hpp"

namespace tvip::scenarios {

// ---------- time-varying quadratic program ----------

TimeVaryingProblem build_tvqp() {
  TimeVaryingProblem problem;
  problem.dimension = 2;
  problem.strong_convexity = 1.0;

  problem.objective.value = [](const Vector& x, double t) {
    const double a = x(0) + std::sin(t);
    const double b = x(1) + std::cos(t);
    return 0.5 * a * a + 1.5 * b * b;
  };
  problem.objective.gradient = [](const Vector& x, double t) {
    Vector g(2);
    g(0) = x(0) + std::sin(t);
    g(1) = 3.0 * (x(1) + std::cos(t));
    return g;
  };
  problem.objective.hessian = [](const Vector&, double) {
    Matrix h(2, 2);
    h << 1.0, 0.0, 0.0, 3.0;
    return h;
  };
  problem.objective.time_partial = [](const Vector& x, double t) {
    return (x(0) + std::sin(t)) * std::cos(t) - 3.0 * (x(1) + std::cos(t)) * std::sin(t);
  };
  problem.objective.grad_time_partial = [](const Vector&, double t) {
    Vector g(2);
    g(0) = std::cos(t);
    g(1) = -3.0 * std::sin(t);
    return g;
  };

  ScalarField f1;
  f1.value = [](const Vector& x, double t) { return x(1) - x(0) - std::cos(t); };
  f1.gradient = [](const Vector&, double) {
    Vector g(2);
    g << -1.0, 1.0;
    return g;
  };
  f1.time_partial = [](const Vector&, double t) { return std::sin(t); };
  f1.grad_time_partial = [](const Vector&, double) { return Vector(Vector::Zero(2)); };
  problem.inequalities.push_back(std::move(f1));
  return problem;
}

TvqpPreset tvqp_paper_preset() {
  TvqpPreset preset;
  preset.x0 = Vector(2);
  preset.x0 << -2.0, 0.0;
  preset.schedules.c0 = 10.0;
  preset.schedules.gamma_c = 1.0;
  preset.schedules.s0 = 2.0;
  preset.schedules.gamma_s = 5.0;
  preset.gains.alpha = 5.0;
  preset.config.tau = 0.1;
  preset.config.t_end = 2.0 * std::numbers::pi;
  return preset;
}

// ---------- l1-regularized least squares ----------

namespace {
constexpr double kRidge = 1e-8;
}

L1lsBuild build_l1ls(std::uint64_t seed, int m, int n, int k_sparsity,
                     double noise_sigma, double lambda) {
  if (m < 1 || n < 1 || k_sparsity < 1 || k_sparsity > n) {
    throw std::invalid_argument("build_l1ls: bad dimensions");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("build_l1ls: lambda must be positive");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  L1lsBuild build;
  L1lsInstance& inst = build.instance;
  inst.seed = seed;
  inst.lambda = lambda;
  inst.a.resize(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) inst.a(i, j) = gauss(rng);
  }

  Vector x_true = Vector::Zero(n);
  std::uniform_int_distribution<int> pick(0, n - 1);
  while (static_cast<int>(inst.support.size()) < k_sparsity) {
    const int idx = pick(rng);
    if (x_true(idx) != 0.0) continue;
    x_true(idx) = (gauss(rng) >= 0.0) ? 1.0 : -1.0;
    inst.support.push_back(idx);
  }
  std::sort(inst.support.begin(), inst.support.end());

  inst.b = inst.a * x_true;
  for (int i = 0; i < m; ++i) inst.b(i) += noise_sigma * gauss(rng);

  // smooth reformulation over w = (x, u), 2n affine inequalities
  auto gram = std::make_shared<Matrix>(2.0 * inst.a.transpose() * inst.a);
  auto a_mat = std::make_shared<Matrix>(inst.a);
  auto b_vec = std::make_shared<Vector>(inst.b);
  const double lam = lambda;

  TimeVaryingProblem& problem = build.problem;
  problem.dimension = 2 * n;
  problem.strong_convexity = 2.0 * kRidge;

  problem.objective.value = [a_mat, b_vec, lam, n](const Vector& w, double) {
    const Vector r = (*a_mat) * w.head(n) - (*b_vec);
    return r.squaredNorm() + lam * w.tail(n).sum() + kRidge * w.squaredNorm();
  };
  problem.objective.gradient = [a_mat, b_vec, lam, n](const Vector& w, double) {
    Vector g(2 * n);
    g.head(n) = 2.0 * a_mat->transpose() * ((*a_mat) * w.head(n) - (*b_vec));
    g.tail(n).setConstant(lam);
    g += 2.0 * kRidge * w;
    return g;
  };
  problem.objective.hessian = [gram, n](const Vector&, double) {
    Matrix h = Matrix::Zero(2 * n, 2 * n);
    h.topLeftCorner(n, n) = *gram;
    h.diagonal().array() += 2.0 * kRidge;
    return h;
  };
  problem.objective.time_partial = [](const Vector&, double) { return 0.0; };
  problem.objective.grad_time_partial = [n](const Vector&, double) {
    return Vector(Vector::Zero(2 * n));
  };

  problem.inequalities.reserve(2 * static_cast<size_t>(n));
  for (int j = 0; j < 2 * n; ++j) {
    const int var = j % n;
    const double sign = j < n ? 1.0 : -1.0;  // x_i - u_i <= 0 then -x_i - u_i <= 0
    ScalarField fi;
    fi.value = [var, sign, n](const Vector& w, double) {
      return sign * w(var) - w(n + var);
    };
    fi.gradient = [var, sign, n](const Vector& w, double) {
      Vector g = Vector::Zero(w.size());
      g(var) = sign;
      g(n + var) = -1.0;
      return g;
    };
    fi.time_partial = [](const Vector&, double) { return 0.0; };
    fi.grad_time_partial = [n](const Vector&, double) {
      return Vector(Vector::Zero(2 * n));
    };
    problem.inequalities.push_back(std::move(fi));
  }
  return build;
}

double relative_gap(const L1lsInstance& instance, const Vector& x) {
  const Vector r = instance.a * x - instance.b;
  const double primal = r.squaredNorm() + instance.lambda * x.lpNorm<1>();
  const Vector corr = 2.0 * instance.a.transpose() * r;
  const double corr_inf = corr.lpNorm<Eigen::Infinity>();
  const double scale = corr_inf > instance.lambda ? instance.lambda / corr_inf : 1.0;
  const Vector nu = 2.0 * scale * r;
  const double g = -0.25 * nu.squaredNorm() - nu.dot(instance.b);
  if (!(g > 0.0)) return std::numeric_limits<double>::infinity();
  return (primal - g) / g;
}

namespace {

double phi_value(const TimeVaryingProblem& problem, const Vector& w, double c,
                 double t) {
  double value = problem.objective.value(w, t);
  for (const ScalarField& fi : problem.inequalities) {
    const double psi = -fi.value(w, t);
    if (!(psi > 0.0)) return std::numeric_limits<double>::infinity();
    value -= std::log(psi) / c;
  }
  return value;
}

// exact for affine constraints; trims the step to keep 0.5% of each residual
double boundary_cap(const DerivativeBundle& bundle, const PhiEvaluation& phi,
                    const Vector& direction) {
  double cap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < bundle.num_inequalities(); ++i) {
    const double slope = bundle.grads_ineq[i].dot(direction);
    if (slope > 0.0) cap = std::min(cap, 0.995 * phi.residuals(i) / slope);
  }
  return cap;
}

}  // namespace

ConvergenceReport run_ipm_comparison(const L1lsBuild& build, IpmMode mode,
                                     const IpmConfig& config) {
  const TimeVaryingProblem& problem = build.problem;
  const int n2 = problem.dimension;
  const int n = n2 / 2;

  ConvergenceReport report;
  report.mode = mode;

  Vector w = Vector::Zero(n2);
  w.tail(n).setOnes();  // x = 0, u = 1 is strictly feasible

  auto gap_of = [&](const Vector& state) {
    return relative_gap(build.instance, state.head(n));
  };

  if (mode == IpmMode::Snipm) {
    double c = config.c0;
    bool done = false;
    while (!done) {
      // damped Newton centering at fixed c
      for (int inner = 0; inner < 200; ++inner) {
        const DerivativeBundle bundle = eval_derivative_bundle(problem, w, 0.0);
        const SchedulePoint sched{c, 0.0, 0.0, 0.0};
        const PhiEvaluation phi = eval_phi(bundle, sched, config.exec);
        const Vector dir = -linalg::solve_spd(phi.hess, phi.grad, config.exec);
        const double decrement = -phi.grad.dot(dir);
        if (decrement <= config.newton_tol) break;

        double step = std::min(1.0, boundary_cap(bundle, phi, dir));
        const double phi0 = phi_value(problem, w, c, 0.0);
        for (int bt = 0; bt < 60; ++bt) {
          const double trial = phi_value(problem, w + step * dir, c, 0.0);
          if (trial <= phi0 - 1e-4 * step * decrement) break;
          step *= 0.5;
        }
        w += step * dir;

        ++report.iterations;
        const double gap = gap_of(w);
        report.gap_trace.push_back(gap);
        if (gap <= config.gap_tol) {
          done = true;
          break;
        }
        if (report.iterations >= config.max_iters) {
          done = true;
          break;
        }
      }
      report.outer_gaps.push_back(gap_of(w));
      if (done || c > 1e15) break;
      c *= config.c_factor;
    }
  } else {
    // discretized barrier dynamics with c(t) = c0 e^t and the grad_xc Phi cdot
    // prediction term; unit nominal step, backtracking on the gradient norm
    BarrierSchedules schedules;
    schedules.c0 = config.c0;
    schedules.gamma_c = 1.0;
    schedules.s0 = 0.0;
    schedules.gamma_s = 0.0;
    schedules.c_cap = 1e16;
    double t = 0.0;
    while (report.iterations < config.max_iters) {
      const DerivativeBundle bundle = eval_derivative_bundle(problem, w, t);
      const SchedulePoint sched = eval_schedules(schedules, t);
      const PhiEvaluation phi = eval_phi(bundle, sched, config.exec);
      const Vector field =
          dynamics::barrier_field(phi, sched, config.alpha, config.exec);

      double h = std::min(config.step, boundary_cap(bundle, phi, field));
      const double norm0 = phi.grad.norm();
      double accepted = -1.0;
      for (int bt = 0; bt < 40; ++bt) {
        const Vector w_trial = w + h * field;
        const SchedulePoint sched_trial = eval_schedules(schedules, t + h);
        bool interior = true;
        for (const ScalarField& fi : problem.inequalities) {
          if (!(fi.value(w_trial, t + h) < 0.0)) {
            interior = false;
            break;
          }
        }
        if (interior) {
          const DerivativeBundle b_trial = eval_derivative_bundle(problem, w_trial, t + h);
          const PhiEvaluation phi_trial = eval_phi(b_trial, sched_trial, config.exec);
          if (phi_trial.grad.norm() <=
              (1.0 - 1e-4 * config.alpha * h) * norm0 + 1e-12) {
            accepted = h;
            w = w_trial;
            break;
          }
        }
        h *= 0.5;
      }
      if (accepted < 0.0) {
        TVIP_LOG_INFO("anipm: no acceptable step at t=%g, taking damped step", t);
        w += h * field;
        accepted = h;
      }
      t += accepted;

      ++report.iterations;
      const double gap = gap_of(w);
      report.gap_trace.push_back(gap);
      if (gap <= config.gap_tol) break;
    }
  }

  report.final_gap = gap_of(w);
  report.converged = report.final_gap <= config.gap_tol;
  report.x = w.head(n);
  return report;
}

// ---------- robot navigation ----------

Vector2 GoalPath::at(double t) const {
  if (period <= 0.0) return point;
  const double w = 2.0 * std::numbers::pi / period;
  return point + Vector2(circle_radius * std::cos(w * t), circle_radius * std::sin(w * t));
}

Vector2 GoalPath::rate(double t) const {
  if (period <= 0.0) return Vector2::Zero();
  const double w = 2.0 * std::numbers::pi / period;
  return Vector2(-circle_radius * w * std::sin(w * t), circle_radius * w * std::cos(w * t));
}

void Workspace::validate() const {
  const double r = robot_radius;
  for (size_t i = 0; i < obstacles.size(); ++i) {
    for (size_t j = i + 1; j < obstacles.size(); ++j) {
      const double dist = (obstacles[i].center - obstacles[j].center).norm();
      if (!(dist > obstacles[i].radius + obstacles[j].radius + 2.0 * r)) {
        throw std::invalid_argument("workspace: obstacles " + std::to_string(i) + "," +
                                    std::to_string(j) + " violate the separation bound");
      }
    }
  }
  const Vector2 g = goal.point;
  if (g(0) < lo(0) || g(0) > hi(0) || g(1) < lo(1) || g(1) > hi(1)) {
    throw std::invalid_argument("workspace: goal outside bounds");
  }
}

double power_distance(const Vector2& x, const Vector2& center, double radius) {
  return (x - center).squaredNorm() - radius * radius;
}

std::vector<Halfspace> local_workspace_halfspaces(const Vector2& x_c,
                                                  const Workspace& workspace) {
  std::vector<Halfspace> out;
  out.reserve(workspace.obstacles.size());
  const double r = workspace.robot_radius;
  for (size_t i = 0; i < workspace.obstacles.size(); ++i) {
    const Obstacle& obs = workspace.obstacles[i];
    const Vector2 d = obs.center - x_c;
    const double dist = d.norm();
    if (!(dist > obs.radius + r)) {
      throw GeometryError(static_cast<int>(i),
                          "robot center inside inflated obstacle " + std::to_string(i));
    }
    Halfspace hs;
    hs.theta = 0.5 - (obs.radius * obs.radius - r * r) / (2.0 * dist * dist);
    hs.a = d;
    hs.b = d.dot(hs.theta * obs.center + (1.0 - hs.theta) * x_c + r * (x_c - obs.center) / dist);
    out.push_back(hs);
  }
  return out;
}

std::vector<HalfspaceRates> eval_workspace_rates(const Vector2& x_c,
                                                 const Vector2& x_hat,
                                                 const Workspace& workspace,
                                                 double gain) {
  const std::vector<Halfspace> halfspaces = local_workspace_halfspaces(x_c, workspace);
  const Vector2 xc_dot = -gain * (x_c - x_hat);
  const double r = workspace.robot_radius;

  std::vector<HalfspaceRates> out;
  out.reserve(halfspaces.size());
  for (size_t i = 0; i < halfspaces.size(); ++i) {
    const Obstacle& obs = workspace.obstacles[i];
    const Halfspace& hs = halfspaces[i];
    const Vector2 d = obs.center - x_c;
    const double n2 = d.squaredNorm();
    HalfspaceRates rates;
    rates.a_dot = -xc_dot;
    rates.theta_dot = -(x_c - obs.center).dot(xc_dot) / (n2 * n2);
    rates.b_dot = -xc_dot.dot(hs.theta * obs.center + (1.0 - hs.theta) * x_c) +
                  rates.theta_dot * n2 +
                  ((1.0 - hs.theta) + r / std::sqrt(n2)) * d.dot(xc_dot);
    out.push_back(rates);
  }
  return out;
}

TimeVaryingProblem build_projected_goal_problem(const Vector2& x_c,
                                                const Vector2& x_hat,
                                                const Workspace& workspace,
                                                double t0) {
  const std::vector<Halfspace> halfspaces = local_workspace_halfspaces(x_c, workspace);
  const std::vector<HalfspaceRates> rates =
      eval_workspace_rates(x_c, x_hat, workspace, workspace.controller_gain);
  const GoalPath goal = workspace.goal;

  TimeVaryingProblem problem;
  problem.dimension = 2;
  problem.strong_convexity = 1.0;

  problem.objective.value = [goal](const Vector& x, double t) {
    const Vector2 d(x(0) - goal.at(t)(0), x(1) - goal.at(t)(1));
    return 0.5 * d.squaredNorm();
  };
  problem.objective.gradient = [goal](const Vector& x, double t) {
    const Vector2 g = goal.at(t);
    Vector out(2);
    out(0) = x(0) - g(0);
    out(1) = x(1) - g(1);
    return out;
  };
  problem.objective.hessian = [](const Vector&, double) {
    return Matrix(Matrix::Identity(2, 2));
  };
  problem.objective.time_partial = [goal](const Vector& x, double t) {
    const Vector2 g = goal.at(t);
    const Vector2 gdot = goal.rate(t);
    return -(x(0) - g(0)) * gdot(0) - (x(1) - g(1)) * gdot(1);
  };
  problem.objective.grad_time_partial = [goal](const Vector&, double t) {
    const Vector2 gdot = goal.rate(t);
    Vector out(2);
    out(0) = -gdot(0);
    out(1) = -gdot(1);
    return out;
  };

  // halfspaces extrapolated at their current rates around the anchor time:
  // the declared time partials are exact for this local model
  for (size_t i = 0; i < halfspaces.size(); ++i) {
    const Vector2 a0 = halfspaces[i].a;
    const Vector2 adot = rates[i].a_dot;
    const double b0 = halfspaces[i].b;
    const double bdot = rates[i].b_dot;
    ScalarField fi;
    fi.value = [a0, adot, b0, bdot, t0](const Vector& x, double t) {
      const double dt = t - t0;
      return (a0(0) + dt * adot(0)) * x(0) + (a0(1) + dt * adot(1)) * x(1) -
             (b0 + dt * bdot);
    };
    fi.gradient = [a0, adot, t0](const Vector&, double t) {
      const double dt = t - t0;
      Vector g(2);
      g(0) = a0(0) + dt * adot(0);
      g(1) = a0(1) + dt * adot(1);
      return g;
    };
    fi.time_partial = [adot, bdot](const Vector& x, double) {
      return adot(0) * x(0) + adot(1) * x(1) - bdot;
    };
    fi.grad_time_partial = [adot](const Vector&, double) {
      Vector g(2);
      g(0) = adot(0);
      g(1) = adot(1);
      return g;
    };
    problem.inequalities.push_back(std::move(fi));
  }
  return problem;
}

namespace {

double collision_margin(const Vector2& x_c, const Workspace& ws) {
  double margin = std::numeric_limits<double>::infinity();
  for (const Obstacle& obs : ws.obstacles) {
    margin = std::min(margin,
                      (x_c - obs.center).norm() - obs.radius - ws.robot_radius);
  }
  return margin;
}

double worst_violation(const std::vector<Halfspace>& hs, const Vector2& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Halfspace& h : hs) worst = std::max(worst, h.a.dot(x) - h.b);
  return worst;
}

}  // namespace

RobotTrajectory robot_simulate(const Workspace& workspace,
                               const dynamics::GainSettings& gains,
                               const BarrierSchedules& schedules,
                               const RobotConfig& config, const Vector2& start) {
  workspace.validate();
  schedules.validate();
  RobotTrajectory traj;

  Vector2 x_c = start;
  Vector2 x_hat = start;  // estimator starts at the robot center
  const double gain = workspace.controller_gain;
  const long steps = static_cast<long>(std::ceil(config.t_end / config.tau - 1e-12));

  auto record = [&](double t, const PhiEvaluation& phi, const SchedulePoint& sched,
                    int backtracks) {
    RobotSample sample;
    sample.t = t;
    sample.x_c = x_c;
    sample.x_hat = x_hat;
    sample.margin = collision_margin(x_c, workspace);
    sample.estimator_violation =
        worst_violation(local_workspace_halfspaces(x_c, workspace), x_hat);
    sample.goal_distance = (x_c - workspace.goal.at(t)).norm();
    sample.c = sched.c;
    sample.grad_norm = phi.grad.norm();
    sample.guard_backtracks = backtracks;
    traj.samples.push_back(sample);
  };

  try {
    if (!(collision_margin(x_c, workspace) > 0.0)) {
      throw GeometryError(-1, "CollisionEvent: start inside an inflated obstacle");
    }
    TimeVaryingProblem problem =
        build_projected_goal_problem(x_c, x_hat, workspace, 0.0);
    Vector hat_vec(2);
    hat_vec << x_hat(0), x_hat(1);
    DerivativeBundle bundle = eval_derivative_bundle(problem, hat_vec, 0.0);
    SchedulePoint sched = eval_schedules(schedules, 0.0);
    PhiEvaluation phi = eval_phi(bundle, sched, config.exec);
    record(0.0, phi, sched, 0);

    for (long k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * config.tau;
      const double t_next = std::min(config.t_end, t + config.tau);
      const double tau_k = t_next - t;

      const Vector field = dynamics::barrier_field(phi, sched, gains.alpha, config.exec);
      Vector2 hat_cand = x_hat + tau_k * Vector2(field(0), field(1));
      const Vector2 xc_next = x_c - tau_k * gain * (x_c - x_hat);

      if (!(collision_margin(xc_next, workspace) > 0.0)) {
        throw GeometryError(-1, "CollisionEvent: margin reached zero at t=" +
                                    std::to_string(t_next));
      }

      // guard the estimator step against the halfspaces it will face next
      const std::vector<Halfspace> hs_next =
          local_workspace_halfspaces(xc_next, workspace);
      const double s_next = eval_schedules(schedules, t_next).s;
      const Vector2 offset = hat_cand - x_hat;
      double scale = 1.0;
      int backtracks = 0;
      for (;; ++backtracks) {
        const Vector2 trial = x_hat + scale * offset;
        if (worst_violation(hs_next, trial) < s_next) {
          hat_cand = trial;
          break;
        }
        if (backtracks >= config.stepper.max_backtracks) {
          throw StepFailure("robot estimator guard exhausted backtracks at t=" +
                            std::to_string(t_next));
        }
        scale *= config.stepper.guard_shrink;
      }

      x_c = xc_next;
      x_hat = hat_cand;
      problem = build_projected_goal_problem(x_c, x_hat, workspace, t_next);
      hat_vec << x_hat(0), x_hat(1);
      bundle = eval_derivative_bundle(problem, hat_vec, t_next);
      sched = eval_schedules(schedules, t_next);
      phi = eval_phi(bundle, sched, config.exec);

      const bool last = (k + 1 == steps);
      if (last || (k + 1) % config.record_stride == 0) {
        record(t_next, phi, sched, backtracks);
      }
    }
  } catch (const GeometryError& e) {
    traj.error = e.what();
  } catch (const SolverError& e) {
    traj.error = e.what();
  }
  return traj;
}

Workspace paper_workspace() {
  Workspace ws;
  ws.lo = Vector2(-20.0, -20.0);
  ws.hi = Vector2(20.0, 20.0);
  ws.robot_radius = 1.0;
  ws.controller_gain = 0.01;
  ws.goal.point = Vector2(15.0, 15.0);
  ws.obstacles = {
      {Vector2(-8.0, -8.0), 1.6}, {Vector2(0.0, -11.0), 2.0},
      {Vector2(9.0, -7.0), 1.5},  {Vector2(-11.0, 3.0), 1.8},
      {Vector2(-2.0, 6.0), 1.6},  {Vector2(7.0, 8.0), 1.7},
      {Vector2(12.0, 1.0), 1.5},  {Vector2(-5.0, 14.0), 1.4},
  };
  return ws;
}

std::vector<Vector2> static_goal_starts() {
  return {Vector2(-15.0, -15.0), Vector2(15.0, -12.0), Vector2(-15.0, 12.0),
          Vector2(-18.0, 0.0)};
}

}  // namespace tvip::scenarios
