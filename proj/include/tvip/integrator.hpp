#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tvip/barrier.hpp"
#include "tvip/dynamics.hpp"
#include "tvip/problem.hpp"

namespace tvip {

enum class Mode {
  Unconstrained,
  Equality,
  Barrier,
  Combined,
  SecondOrder,
  Robust,
};

const char* mode_name(Mode mode);

struct IntegratorConfig {
  double tau = 0.1;
  double t_end = 1.0;
  double guard_shrink = 0.5;
  int max_backtracks = 40;
  bool line_search = false;
  double armijo_c = 1e-4;
  bool use_rk4 = false;  // accuracy studies only, not part of paper presets
  Exec exec = Exec::Serial;

  void validate() const;
};

struct TrajectorySample {
  double t = 0.0;
  Vector x;
  Vector nu;          // size 0 unless an equality block is present
  Vector y;           // size 0 unless second-order mode
  Vector psi;         // size 0 unless a barrier is active
  double c = 0.0;
  double s = 0.0;
  double grad_norm = 0.0;  // ||grad Phi||, ||grad_z L||, or ||grad f0||
  Vector lambda_hat;       // size 0 unless a barrier is active
  int guard_backtracks = 0;
  bool regularized = false;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::string error;  // empty on clean finish, otherwise the abort reason

  bool ok() const { return error.empty(); }
  double min_psi() const;  // +inf when no barrier samples exist
  const TrajectorySample& back() const { return samples.back(); }
};

struct InitialState {
  Vector x;
  Vector nu;  // defaults to zeros when an equality block is present
  Vector y;   // defaults to zeros in second-order mode
};

// Supplies the d_dt estimate consumed by robust mode. The returned vector
// must stay within eta_bound of the true value.
using PredictionEstimator = std::function<Vector(double t, const Vector& d_dt)>;

Vector euler_step(const Vector& field_value, const Vector& state, double tau);

// Backtracks candidate toward prev until every residual s(t_next) - f_i is
// strictly positive. Returns the accepted state and the number of shrinks;
// throws StepFailure when max_backtracks is exhausted.
struct GuardResult {
  Vector state;
  int backtracks = 0;
};
GuardResult feasibility_guard(const Vector& prev, const Vector& candidate,
                              const TimeVaryingProblem& problem, double s_next,
                              double t_next, const IntegratorConfig& config);

// Fixed-step forward Euler drive of the selected dynamics. On solver errors
// the partial trajectory is returned with the error tag set.
Trajectory integrate(const TimeVaryingProblem& problem, Mode mode,
                     const dynamics::GainSettings& gains,
                     const BarrierSchedules& schedules,
                     const IntegratorConfig& config, const InitialState& init,
                     const PredictionEstimator& estimator = nullptr);

// Least-squares slope of log(values) against times; used by the decay tests
// and the convergence diagnostics. Non-positive values are skipped.
double fit_log_slope(const std::vector<double>& times,
                     const std::vector<double>& values);

}  // namespace tvip
