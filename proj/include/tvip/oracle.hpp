#pragma once

#include <vector>

#include "tvip/integrator.hpp"
#include "tvip/problem.hpp"

namespace tvip::oracle {

struct OracleConfig {
  double tol = 1e-10;        // KKT residual target
  double c_start = 10.0;     // geometric barrier sequence c_k = c_start * c_factor^k
  double c_factor = 5.0;
  int max_newton_iters = 200;  // per centering round
  int max_outer_rounds = 60;
  Exec exec = Exec::Serial;
};

struct StaticSolution {
  Vector x;
  Vector lambda;  // p
  Vector nu;      // q
  double kkt_residual = 0.0;
  double c_final = 0.0;
};

// High-precision reference solution of the sampled (time-frozen) problem via
// damped-Newton barrier centering over a growing c sequence. Infeasible
// starts are handled with a slack residual driven to zero alongside the
// c sequence. Throws OracleFailure when centering diverges.
StaticSolution solve_static(const TimeVaryingProblem& problem, double t,
                            const OracleConfig& config = {});

// Direct KKT solve of min 1/2 x^T H x + g^T x s.t. A x = b.
struct EqualityQpSolution {
  Vector x;
  Vector nu;
};
EqualityQpSolution solve_equality_qp(const Matrix& h, const Vector& g,
                                     const Matrix& a, const Vector& b,
                                     Exec exec = Exec::Serial);

// ||x(t_k) - x*(t_k)|| at every stride-th trajectory sample. Failed sample
// solves are flagged (error < 0) and the series continues. Sample solves run
// in parallel when config.exec allows it.
struct TrackingErrorPoint {
  double t = 0.0;
  double error = 0.0;
  bool oracle_failed = false;
};
std::vector<TrackingErrorPoint> tracking_error(const Trajectory& traj,
                                               const TimeVaryingProblem& problem,
                                               int sample_stride,
                                               const OracleConfig& config = {});

}  // namespace tvip::oracle
