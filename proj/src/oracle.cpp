#include "tvip/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tvip/barrier.hpp"
#include "tvip/linalg.hpp"
#include "tvip/log.hpp"

namespace tvip::oracle {

namespace {

struct FrozenEval {
  Vector grad;   // grad_z of Phi + equality coupling
  Matrix hess;   // grad_xx Phi
  Vector psi;    // p residuals (s = 0 here)
  double value = 0.0;
};

// One damped-Newton centering pass on Phi(x; c, t) + nu^T (A x - b) at a
// frozen time. Keeps iterates strictly interior with a fraction-to-boundary
// cap and backtracks on the KKT residual norm.
struct Centering {
  const TimeVaryingProblem& problem;
  double t;
  double c;
  const OracleConfig& config;

  Vector residual(const Vector& x, const Vector& nu, const DerivativeBundle& bundle,
                  const PhiEvaluation& phi) const {
    const int n = problem.dimension;
    const int q = problem.num_equalities();
    Vector r(n + q);
    r.head(n) = phi.grad;
    if (q > 0) {
      r.head(n) += bundle.eq_A.transpose() * nu;
      r.tail(q) = bundle.eq_A * x - bundle.eq_b;
    }
    return r;
  }

  // returns final residual norm
  double run(Vector& x, Vector& nu) const {
    const int n = problem.dimension;
    const int q = problem.num_equalities();
    const int p = problem.num_inequalities();
    const SchedulePoint sched{c, 0.0, 0.0, 0.0};

    double res_norm = 0.0;
    for (int iter = 0; iter < config.max_newton_iters; ++iter) {
      const DerivativeBundle bundle = eval_derivative_bundle(problem, x, t);
      const PhiEvaluation phi = eval_phi(bundle, sched, config.exec);
      const Vector r = residual(x, nu, bundle, phi);
      res_norm = r.norm();
      if (res_norm <= 0.01 * config.tol) return res_norm;

      Vector dir;
      if (q > 0) {
        dir = linalg::solve_kkt(phi.hess, bundle.eq_A, -r, config.exec);
      } else {
        dir = linalg::solve_spd(phi.hess, -r, config.exec);
      }
      const Vector dx = dir.head(n);

      // fraction-to-boundary, exact for affine constraints, then verified
      double sigma = 1.0;
      for (int i = 0; i < p; ++i) {
        const double slope = bundle.grads_ineq[i].dot(dx);
        if (slope > 0.0) sigma = std::min(sigma, 0.995 * phi.residuals(i) / slope);
      }
      // backtrack until strictly interior and the residual improves
      double accepted = -1.0;
      for (int bt = 0; bt < 60; ++bt) {
        const Vector x_trial = x + sigma * dx;
        bool interior = true;
        for (int i = 0; i < p; ++i) {
          if (!(problem.inequalities[i].value(x_trial, t) < 0.0)) {
            interior = false;
            break;
          }
        }
        if (interior) {
          const Vector nu_trial = q > 0 ? Vector(nu + sigma * dir.tail(q)) : nu;
          const DerivativeBundle bt_bundle = eval_derivative_bundle(problem, x_trial, t);
          const PhiEvaluation bt_phi = eval_phi(bt_bundle, sched, config.exec);
          const double trial_norm = residual(x_trial, nu_trial, bt_bundle, bt_phi).norm();
          if (trial_norm <= (1.0 - 1e-4 * sigma) * res_norm || sigma < 1e-12) {
            x = x_trial;
            nu = nu_trial;
            accepted = trial_norm;
            break;
          }
        }
        sigma *= 0.5;
      }
      if (accepted < 0.0) {
        throw OracleFailure("oracle: Newton line search failed at t=" + std::to_string(t) +
                            ", c=" + std::to_string(c));
      }
      res_norm = accepted;
    }
    return res_norm;
  }
};

// Minimizes w + (rho/2)||x - x0||^2 subject to f_i(x) <= w through the same
// barrier machinery; succeeds once the iterate is strictly feasible for the
// original constraints.
Vector phase_one(const TimeVaryingProblem& problem, double t, const Vector& x0,
                 const OracleConfig& config) {
  const int n = problem.dimension;
  const int p = problem.num_inequalities();
  constexpr double kReg = 1e-3;

  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < p; ++i) {
    worst = std::max(worst, problem.inequalities[i].value(x0, t));
  }
  if (worst < 0.0) return x0;

  TimeVaryingProblem aux;
  aux.dimension = n + 1;
  aux.strong_convexity = kReg;
  aux.objective.value = [x0](const Vector& z, double) {
    const Vector x = z.head(z.size() - 1);
    return z(z.size() - 1) + 0.5 * kReg * (x - x0).squaredNorm();
  };
  aux.objective.gradient = [x0](const Vector& z, double) {
    const int m = static_cast<int>(z.size()) - 1;
    Vector g(z.size());
    g.head(m) = kReg * (z.head(m) - x0);
    g(m) = 1.0;
    return g;
  };
  aux.objective.hessian = [](const Vector& z, double) {
    Matrix h = Matrix::Identity(z.size(), z.size()) * kReg;
    h(z.size() - 1, z.size() - 1) = 0.0;
    return h;
  };
  aux.objective.time_partial = [](const Vector&, double) { return 0.0; };
  aux.objective.grad_time_partial = [](const Vector& z, double) {
    return Vector(Vector::Zero(z.size()));
  };
  for (int i = 0; i < p; ++i) {
    const ScalarField& fi = problem.inequalities[i];
    ScalarField shifted;
    shifted.value = [fi, t](const Vector& z, double) {
      return fi.value(z.head(z.size() - 1), t) - z(z.size() - 1);
    };
    shifted.gradient = [fi, t](const Vector& z, double) {
      const int m = static_cast<int>(z.size()) - 1;
      Vector g(z.size());
      g.head(m) = fi.gradient(z.head(m), t);
      g(m) = -1.0;
      return g;
    };
    if (fi.hessian) {
      shifted.hessian = [fi, t](const Vector& z, double) {
        const int m = static_cast<int>(z.size()) - 1;
        Matrix h = Matrix::Zero(z.size(), z.size());
        h.topLeftCorner(m, m) = fi.hessian(z.head(m), t);
        return h;
      };
    }
    shifted.time_partial = [](const Vector&, double) { return 0.0; };
    shifted.grad_time_partial = [](const Vector& z, double) {
      return Vector(Vector::Zero(z.size()));
    };
    aux.inequalities.push_back(std::move(shifted));
  }

  Vector z(n + 1);
  z.head(n) = x0;
  z(n) = worst + 1.0;  // strictly feasible for the lifted constraints
  Vector nu(0);

  double c = config.c_start;
  for (int round = 0; round < config.max_outer_rounds; ++round) {
    Centering centering{aux, 0.0, c, config};
    centering.run(z, nu);
    double max_f = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < p; ++i) {
      max_f = std::max(max_f, problem.inequalities[i].value(z.head(n), t));
    }
    if (max_f < -1e-8) return z.head(n);
    c *= config.c_factor;
  }
  throw OracleFailure("oracle: phase-I found no strictly feasible point at t=" +
                      std::to_string(t));
}

}  // namespace

StaticSolution solve_static(const TimeVaryingProblem& problem, double t,
                            const OracleConfig& config) {
  problem.validate();
  if (t < 0.0) throw std::invalid_argument("solve_static: t must be >= 0");
  const int n = problem.dimension;
  const int p = problem.num_inequalities();
  const int q = problem.num_equalities();

  Vector x = Vector::Zero(n);
  if (q > 0) {
    // project the start onto A x = b
    const DerivativeBundle bundle = eval_derivative_bundle(problem, x, t);
    Vector rhs(n + q);
    rhs.head(n) = x;
    rhs.tail(q) = bundle.eq_b;
    const Vector z = linalg::solve_kkt(Matrix::Identity(n, n), bundle.eq_A, rhs,
                                       config.exec);
    x = z.head(n);
  }
  if (p > 0) x = phase_one(problem, t, x, config);
  Vector nu = Vector::Zero(q);

  StaticSolution sol;
  double c = config.c_start;
  double residual = 0.0;
  for (int round = 0; round < config.max_outer_rounds; ++round) {
    Centering centering{problem, t, c, config};
    residual = centering.run(x, nu);
    const double gap = p > 0 ? static_cast<double>(p) / c : 0.0;
    if (gap <= config.tol && residual <= config.tol) break;
    c *= config.c_factor;
  }
  if (!(residual <= config.tol)) {
    throw OracleFailure("oracle: centering stalled at residual " +
                        std::to_string(residual) + " (t=" + std::to_string(t) + ")");
  }

  sol.x = x;
  sol.nu = nu;
  sol.c_final = c;
  sol.kkt_residual = residual;
  if (p > 0) {
    Vector psi(p);
    for (int i = 0; i < p; ++i) psi(i) = -problem.inequalities[i].value(x, t);
    sol.lambda = estimate_duals(psi, c).lambdas;
  } else {
    sol.lambda = Vector::Zero(0);
  }
  return sol;
}

EqualityQpSolution solve_equality_qp(const Matrix& h, const Vector& g,
                                     const Matrix& a, const Vector& b, Exec exec) {
  const int n = static_cast<int>(h.rows());
  const int q = static_cast<int>(a.rows());
  Vector rhs(n + q);
  rhs.head(n) = -g;
  rhs.tail(q) = b;
  const Vector z = linalg::solve_kkt(h, a, rhs, exec);
  EqualityQpSolution sol;
  sol.x = z.head(n);
  sol.nu = z.tail(q);
  const double res = (h * sol.x + g + a.transpose() * sol.nu).norm() +
                     (a * sol.x - b).norm();
  if (!(res <= 1e-10 * (1.0 + rhs.norm()))) {
    throw SingularSystem(-1, "solve_equality_qp: residual too large");
  }
  return sol;
}

std::vector<TrackingErrorPoint> tracking_error(const Trajectory& traj,
                                               const TimeVaryingProblem& problem,
                                               int sample_stride,
                                               const OracleConfig& config) {
  if (traj.samples.empty()) {
    throw std::invalid_argument("tracking_error: trajectory is empty");
  }
  if (sample_stride < 1) {
    throw std::invalid_argument("tracking_error: stride must be positive");
  }
  std::vector<int> picks;
  for (size_t i = 0; i < traj.samples.size(); i += static_cast<size_t>(sample_stride)) {
    picks.push_back(static_cast<int>(i));
  }
  std::vector<TrackingErrorPoint> series(picks.size());

  const auto solve_one = [&](int slot) {
    const TrajectorySample& sample = traj.samples[static_cast<size_t>(picks[slot])];
    TrackingErrorPoint point;
    point.t = sample.t;
    try {
      const StaticSolution sol = solve_static(problem, sample.t, config);
      point.error = (sample.x - sol.x).norm();
    } catch (const SolverError& e) {
      TVIP_LOG_INFO("tracking_error: oracle failed at t=%g: %s", sample.t, e.what());
      point.oracle_failed = true;
      point.error = -1.0;
    }
    series[static_cast<size_t>(slot)] = point;
  };

  if (config.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(picks.size()); ++i) solve_one(i);
  } else {
    for (int i = 0; i < static_cast<int>(picks.size()); ++i) solve_one(i);
  }
  return series;
}

}  // namespace tvip::oracle
