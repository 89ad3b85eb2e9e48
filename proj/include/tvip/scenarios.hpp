#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tvip/integrator.hpp"
#include "tvip/oracle.hpp"
#include "tvip/problem.hpp"

namespace tvip::scenarios {

// ---------- time-varying quadratic program ----------

// min 1/2 (x1 + sin t)^2 + 3/2 (x2 + cos t)^2  s.t.  x2 - x1 - cos t <= 0.
TimeVaryingProblem build_tvqp();

struct TvqpPreset {
  Vector x0;
  BarrierSchedules schedules;  // c0=10, gamma_c=1, s0=2, gamma_s=5
  dynamics::GainSettings gains;
  IntegratorConfig config;     // tau=0.1, t_end=2*pi
};
TvqpPreset tvqp_paper_preset();

// ---------- l1-regularized least squares ----------

struct L1lsInstance {
  Matrix a;  // m x n measurement matrix
  Vector b;  // m observations
  double lambda = 2.0;
  std::vector<int> support;  // ground-truth support, reporting only
  std::uint64_t seed = 0;

  int rows() const { return static_cast<int>(a.rows()); }
  int cols() const { return static_cast<int>(a.cols()); }
};

// Gaussian A, k-sparse +-1 signal, additive N(0, sigma^2) noise. The smooth
// reformulation over (x,u) carries a 1e-8 ridge so the declared strong
// convexity assumption holds.
struct L1lsBuild {
  L1lsInstance instance;
  TimeVaryingProblem problem;  // dimension 2n, 2n affine inequalities
};
L1lsBuild build_l1ls(std::uint64_t seed, int m, int n, int k_sparsity,
                     double noise_sigma, double lambda);

// Upper bound (primal - g(nu)) / g(nu) on the relative duality gap with the
// scaled dual-feasible point nu = 2(Ax-b) min(1, lambda/||2A^T(Ax-b)||_inf).
// Returns +inf when g(nu) <= 0.
double relative_gap(const L1lsInstance& instance, const Vector& x);

enum class IpmMode { Snipm, Anipm };

struct IpmConfig {
  double gap_tol = 1e-4;
  int max_iters = 2000;
  // SNIPM: c_k = c0 * c_factor^k, Newton centering per round.
  double c0 = 10.0;
  double c_factor = 5.0;
  double newton_tol = 1e-9;  // squared Newton decrement threshold
  // ANIPM: c(t) = c0 e^t driven by the prediction-correction field,
  // unit nominal step with backtracking.
  double alpha = 1.0;
  double step = 1.0;
  Exec exec = Exec::Serial;
};

struct ConvergenceReport {
  IpmMode mode = IpmMode::Snipm;
  bool converged = false;
  int iterations = 0;            // factorization steps until gap_tol
  std::vector<double> gap_trace; // gap after each iteration
  std::vector<double> outer_gaps;  // SNIPM: gap after each centering round
  double final_gap = 0.0;
  Vector x;
};
ConvergenceReport run_ipm_comparison(const L1lsBuild& build, IpmMode mode,
                                     const IpmConfig& config = {});

// ---------- robot navigation ----------

struct Obstacle {
  Vector2 center;
  double radius = 1.0;
};

struct GoalPath {
  // Static goal by default; circular path when period > 0.
  Vector2 point{0.0, 0.0};
  double circle_radius = 0.0;
  double period = 0.0;

  Vector2 at(double t) const;
  Vector2 rate(double t) const;
};

struct Workspace {
  Vector2 lo{-20.0, -20.0};
  Vector2 hi{20.0, 20.0};
  std::vector<Obstacle> obstacles;
  double robot_radius = 1.0;
  double controller_gain = 0.01;  // K
  GoalPath goal;

  void validate() const;  // pairwise separation > r_i + r_j + 2r, goal in bounds
};

struct Halfspace {
  Vector2 a;
  double b = 0.0;
  double theta = 0.0;
};

struct HalfspaceRates {
  Vector2 a_dot;
  double theta_dot = 0.0;
  double b_dot = 0.0;
};

// ||x - center||^2 - radius^2
double power_distance(const Vector2& x, const Vector2& center, double radius);

// Collision-free local workspace boundaries around the robot center.
// Throws GeometryError when x_c is inside an obstacle inflated by the robot
// radius.
std::vector<Halfspace> local_workspace_halfspaces(const Vector2& x_c,
                                                  const Workspace& workspace);

// Halfspace motion under the closed loop xdot_c = -K (x_c - x_hat).
std::vector<HalfspaceRates> eval_workspace_rates(const Vector2& x_c,
                                                 const Vector2& x_hat,
                                                 const Workspace& workspace,
                                                 double gain);

// Projected-goal estimation problem anchored at time t0: objective
// 1/2 ||x - x_d(t)||^2 with the local halfspaces extrapolated at their
// current rates, so the declared time partials are exact for the oracle.
TimeVaryingProblem build_projected_goal_problem(const Vector2& x_c,
                                                const Vector2& x_hat,
                                                const Workspace& workspace,
                                                double t0);

struct RobotSample {
  double t = 0.0;
  Vector2 x_c;
  Vector2 x_hat;
  double margin = 0.0;          // min_i ||x_c - x_i|| - r_i - r
  double estimator_violation = 0.0;  // max_i a_i^T x_hat - b_i (<= 0 inside LF)
  double goal_distance = 0.0;   // ||x_c - x_d(t)||
  double c = 0.0;
  double grad_norm = 0.0;
  int guard_backtracks = 0;
};

struct RobotTrajectory {
  std::vector<RobotSample> samples;
  std::string error;  // CollisionEvent or solver failure; empty when clean

  bool ok() const { return error.empty(); }
};

struct RobotConfig {
  double tau = 0.1;
  double t_end = 1000.0;
  int record_stride = 1;  // every sample is checked; stride only thins storage
  IntegratorConfig stepper;  // guard parameters reused for the estimator step
  Exec exec = Exec::Serial;
};

// Co-integrates the controller and the projected-goal estimator on a shared
// clock, one Euler step per loop each. Aborts with a CollisionEvent when the
// collision margin reaches zero.
RobotTrajectory robot_simulate(const Workspace& workspace,
                               const dynamics::GainSettings& gains,
                               const BarrierSchedules& schedules,
                               const RobotConfig& config, const Vector2& start);

Workspace paper_workspace();          // [-20,20]^2, 8 obstacles, r = 1
std::vector<Vector2> static_goal_starts();

}  // namespace tvip::scenarios
