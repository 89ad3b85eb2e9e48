#pragma once

// Shared hand-built problems for the unit suites.

#include <cmath>

#include "tvip/problem.hpp"

namespace tvip::testing {

// f0 = 1/2 (x + sin t)^2, one variable, analytic time partials
inline TimeVaryingProblem scalar_tracking_problem() {
  TimeVaryingProblem problem;
  problem.dimension = 1;
  problem.strong_convexity = 1.0;
  problem.objective.value = [](const Vector& x, double t) {
    const double a = x(0) + std::sin(t);
    return 0.5 * a * a;
  };
  problem.objective.gradient = [](const Vector& x, double t) {
    Vector g(1);
    g(0) = x(0) + std::sin(t);
    return g;
  };
  problem.objective.hessian = [](const Vector&, double) {
    return Matrix(Matrix::Ones(1, 1));
  };
  problem.objective.time_partial = [](const Vector& x, double t) {
    return (x(0) + std::sin(t)) * std::cos(t);
  };
  problem.objective.grad_time_partial = [](const Vector&, double t) {
    Vector g(1);
    g(0) = std::cos(t);
    return g;
  };
  return problem;
}

// f0 = 1/2 x^2 with the single affine constraint x - 1 <= 0
inline TimeVaryingProblem scalar_barrier_problem() {
  TimeVaryingProblem problem;
  problem.dimension = 1;
  problem.strong_convexity = 1.0;
  problem.objective.value = [](const Vector& x, double) { return 0.5 * x(0) * x(0); };
  problem.objective.gradient = [](const Vector& x, double) {
    Vector g(1);
    g(0) = x(0);
    return g;
  };
  problem.objective.hessian = [](const Vector&, double) {
    return Matrix(Matrix::Ones(1, 1));
  };
  problem.objective.time_partial = [](const Vector&, double) { return 0.0; };
  problem.objective.grad_time_partial = [](const Vector&, double) {
    return Vector(Vector::Zero(1));
  };
  ScalarField f1;
  f1.value = [](const Vector& x, double) { return x(0) - 1.0; };
  f1.gradient = [](const Vector&, double) { return Vector(Vector::Ones(1)); };
  f1.time_partial = [](const Vector&, double) { return 0.0; };
  f1.grad_time_partial = [](const Vector&, double) { return Vector(Vector::Zero(1)); };
  problem.inequalities.push_back(std::move(f1));
  return problem;
}

// min 1/2 ||x||^2 s.t. 1^T x = t, the analytic equality example with
// x*(t) = (t/2, t/2) and nu*(t) = -t/2
inline TimeVaryingProblem sum_equality_problem() {
  TimeVaryingProblem problem;
  problem.dimension = 2;
  problem.strong_convexity = 1.0;
  problem.objective.value = [](const Vector& x, double) { return 0.5 * x.squaredNorm(); };
  problem.objective.gradient = [](const Vector& x, double) { return x; };
  problem.objective.hessian = [](const Vector&, double) {
    return Matrix(Matrix::Identity(2, 2));
  };
  problem.objective.time_partial = [](const Vector&, double) { return 0.0; };
  problem.objective.grad_time_partial = [](const Vector&, double) {
    return Vector(Vector::Zero(2));
  };
  AffineEquality eq;
  eq.rows = 1;
  eq.matrix = [](double) {
    Matrix a(1, 2);
    a << 1.0, 1.0;
    return a;
  };
  eq.rhs = [](double t) {
    Vector b(1);
    b(0) = t;
    return b;
  };
  eq.rhs_dot = [](double) {
    Vector b(1);
    b(0) = 1.0;
    return b;
  };
  problem.equality = std::move(eq);
  return problem;
}

// two-variable problem with one curved and one affine constraint; exercises
// the constraint-Hessian path of the barrier assembly
inline TimeVaryingProblem curved_constraint_problem() {
  TimeVaryingProblem problem;
  problem.dimension = 2;
  problem.strong_convexity = 1.0;
  problem.objective.value = [](const Vector& x, double t) {
    return 0.5 * x.squaredNorm() + 0.2 * std::sin(t) * x(0);
  };
  problem.objective.gradient = [](const Vector& x, double t) {
    Vector g = x;
    g(0) += 0.2 * std::sin(t);
    return g;
  };
  problem.objective.hessian = [](const Vector&, double) {
    return Matrix(Matrix::Identity(2, 2));
  };
  problem.objective.time_partial = [](const Vector& x, double t) {
    return 0.2 * std::cos(t) * x(0);
  };
  problem.objective.grad_time_partial = [](const Vector&, double t) {
    Vector g(2);
    g << 0.2 * std::cos(t), 0.0;
    return g;
  };

  ScalarField curved;
  curved.value = [](const Vector& x, double t) {
    return 0.5 * (x(0) * x(0) + 2.0 * x(1) * x(1)) - 1.0 + 0.3 * std::sin(t);
  };
  curved.gradient = [](const Vector& x, double) {
    Vector g(2);
    g << x(0), 2.0 * x(1);
    return g;
  };
  curved.hessian = [](const Vector&, double) {
    Matrix h(2, 2);
    h << 1.0, 0.0, 0.0, 2.0;
    return h;
  };
  curved.time_partial = [](const Vector&, double t) { return 0.3 * std::cos(t); };
  curved.grad_time_partial = [](const Vector&, double) {
    return Vector(Vector::Zero(2));
  };
  problem.inequalities.push_back(std::move(curved));

  ScalarField affine;
  affine.value = [](const Vector& x, double t) {
    return x(0) + x(1) - 3.0 - 0.5 * std::cos(t);
  };
  affine.gradient = [](const Vector&, double) {
    Vector g(2);
    g << 1.0, 1.0;
    return g;
  };
  affine.time_partial = [](const Vector&, double t) { return 0.5 * std::sin(t); };
  affine.grad_time_partial = [](const Vector&, double) {
    return Vector(Vector::Zero(2));
  };
  problem.inequalities.push_back(std::move(affine));
  return problem;
}

}  // namespace tvip::testing
