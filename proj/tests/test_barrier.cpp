#include <doctest.h>

#include <random>

#include "fd_checks.hpp"
#include "test_problems.hpp"
#include "tvip/barrier.hpp"
#include "tvip/scenarios.hpp"

using namespace tvip;

TEST_CASE("schedule evaluation pinned values") {
  BarrierSchedules sched;
  sched.c0 = 10.0;
  sched.gamma_c = 1.0;
  sched.s0 = 2.0;
  sched.gamma_s = 5.0;
  const SchedulePoint p0 = eval_schedules(sched, 0.0);
  CHECK(p0.c == doctest::Approx(10.0));
  CHECK(p0.c_dot == doctest::Approx(10.0));
  CHECK(p0.s == doctest::Approx(2.0));
  CHECK(p0.s_dot == doctest::Approx(-10.0));

  BarrierSchedules frozen;
  frozen.c0 = 7.0;
  frozen.gamma_c = 0.0;
  frozen.s0 = 0.0;
  const SchedulePoint p1 = eval_schedules(frozen, 13.0);
  CHECK(p1.c == doctest::Approx(7.0));
  CHECK(p1.c_dot == doctest::Approx(0.0));

  BarrierSchedules capped;
  capped.c0 = 10.0;
  capped.gamma_c = 1.0;
  capped.c_cap = 100.0;
  capped.s0 = 0.0;
  const SchedulePoint p2 = eval_schedules(capped, 5.0);
  CHECK(p2.c == doctest::Approx(100.0));
  CHECK(p2.c_dot == 0.0);
}

TEST_CASE("schedules are monotone") {
  BarrierSchedules sched;
  sched.c0 = 3.0;
  sched.gamma_c = 0.7;
  sched.s0 = 1.5;
  sched.gamma_s = 2.0;
  double prev_c = 0.0;
  double prev_s = std::numeric_limits<double>::infinity();
  for (double t = 0.0; t <= 40.0; t += 0.25) {
    const SchedulePoint p = eval_schedules(sched, t);
    CHECK(p.c >= prev_c);
    CHECK(p.s <= prev_s);
    prev_c = p.c;
    prev_s = p.s;
  }
}

TEST_CASE("eval_phi pinned scalar example") {
  const TimeVaryingProblem problem = testing::scalar_barrier_problem();
  Vector x = Vector::Zero(1);
  const DerivativeBundle bundle = eval_derivative_bundle(problem, x, 0.0);
  const PhiEvaluation phi = eval_phi(bundle, SchedulePoint{1.0, 0.0, 0.0, 0.0});
  CHECK(phi.residuals(0) == doctest::Approx(1.0));
  CHECK(phi.phi == doctest::Approx(0.0));
  CHECK(phi.grad(0) == doctest::Approx(1.0));
  CHECK(phi.hess(0, 0) == doctest::Approx(2.0));
  CHECK(phi.d_ds(0) == doctest::Approx(-1.0));
  CHECK(phi.d_dc(0) == doctest::Approx(-1.0));

  Vector x2(1);
  x2 << 0.5;
  const DerivativeBundle b2 = eval_derivative_bundle(problem, x2, 0.0);
  const PhiEvaluation phi2 = eval_phi(b2, SchedulePoint{1.0, 0.0, 0.0, 0.0});
  CHECK(phi2.residuals(0) == doctest::Approx(0.5));
  CHECK(phi2.grad(0) == doctest::Approx(2.5));
}

TEST_CASE("eval_phi with no constraints reduces to the objective") {
  const TimeVaryingProblem problem = testing::scalar_tracking_problem();
  Vector x(1);
  x << 0.4;
  const DerivativeBundle bundle = eval_derivative_bundle(problem, x, 0.9);
  const PhiEvaluation phi = eval_phi(bundle, SchedulePoint{5.0, 5.0, 0.0, 0.0});
  CHECK(phi.phi == bundle.f0);
  CHECK(phi.grad == bundle.grad_f0);
  CHECK(phi.d_ds.norm() == 0.0);
  CHECK(phi.d_dc.norm() == 0.0);
}

TEST_CASE("eval_phi rejects boundary points with the constraint index") {
  const TimeVaryingProblem problem = testing::scalar_barrier_problem();
  Vector boundary(1);
  boundary << 1.0;  // psi = 0 exactly
  const DerivativeBundle bundle = eval_derivative_bundle(problem, boundary, 0.0);
  try {
    eval_phi(bundle, SchedulePoint{1.0, 0.0, 0.0, 0.0});
    CHECK(false);
  } catch (const DomainViolation& e) {
    CHECK(e.constraint_index == 0);
  }
}

TEST_CASE("dual estimates") {
  Vector psi1(1);
  psi1 << 1.0;
  CHECK(estimate_duals(psi1, 1.0).lambdas(0) == doctest::Approx(1.0));

  Vector psi2(2);
  psi2 << 0.5, 2.0;
  const DualEstimate d = estimate_duals(psi2, 10.0);
  CHECK(d.lambdas(0) == doctest::Approx(0.2));
  CHECK(d.lambdas(1) == doctest::Approx(0.05));

  Vector bad(1);
  bad << 0.0;
  CHECK_THROWS_AS(estimate_duals(bad, 1.0), DomainViolation);
}

TEST_CASE("suboptimality bound") {
  Vector lam(1);
  lam << 0.75;
  CHECK(suboptimality_bound(1, 10.0, lam, 2.0) == doctest::Approx(1.6));
  CHECK(suboptimality_bound(0, 5.0, Vector::Zero(0), 3.0) == doctest::Approx(0.0));
  CHECK(suboptimality_bound(2, 1e12, Vector::Zero(2), 0.0) ==
        doctest::Approx(2e-12));
}

TEST_CASE("barrier partials match finite differences on interior points") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ux(-2.0, 2.0);
  std::uniform_real_distribution<double> ut(0.1, 6.0);
  std::uniform_real_distribution<double> uc(0.0, 3.0);
  std::uniform_real_distribution<double> upad(0.5, 1.5);

  const TimeVaryingProblem tvqp = scenarios::build_tvqp();
  const TimeVaryingProblem curved = testing::curved_constraint_problem();
  for (const TimeVaryingProblem* problem : {&tvqp, &curved}) {
    for (int trial = 0; trial < 40; ++trial) {
      Vector x(2);
      x << ux(rng), ux(rng);
      const double t = ut(rng);
      double worst_f = 0.0;
      for (const ScalarField& fi : problem->inequalities) {
        worst_f = std::max(worst_f, fi.value(x, t));
      }
      const double s = std::max(0.0, worst_f) + upad(rng);
      const double c = std::pow(10.0, uc(rng));
      CHECK(testing::phi_partials_worst_error(*problem, x, t, c, s, rng) <= 1e-6);
    }
  }
}

TEST_CASE("barrier hessian keeps the declared strong convexity") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> ux(-2.0, 2.0);
  const TimeVaryingProblem tvqp = scenarios::build_tvqp();
  for (int trial = 0; trial < 30; ++trial) {
    Vector x(2);
    x << ux(rng), ux(rng);
    const double t = 0.3 * trial;
    const DerivativeBundle bundle = eval_derivative_bundle(tvqp, x, t);
    const double s = std::max(0.0, bundle.f_ineq.maxCoeff()) + 1.0;
    const PhiEvaluation phi = eval_phi(bundle, SchedulePoint{10.0, 0.0, s, 0.0});
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(phi.hess);
    CHECK(eig.eigenvalues().minCoeff() >= tvqp.strong_convexity - 1e-9);
  }
}

TEST_CASE("serial and parallel barrier assembly agree") {
  const auto build = scenarios::build_l1ls(2, 16, 32, 3, 0.1, 2.0);
  Vector w = Vector::Zero(64);
  w.tail(32).setOnes();
  const DerivativeBundle bundle = eval_derivative_bundle(build.problem, w, 0.0);
  const SchedulePoint sched{10.0, 10.0, 0.0, 0.0};
  const PhiEvaluation a = eval_phi(bundle, sched, Exec::Serial);
  const PhiEvaluation b = eval_phi(bundle, sched, Exec::Parallel);
  CHECK((a.hess - b.hess).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.grad - b.grad).cwiseAbs().maxCoeff() == 0.0);
}
