#include <doctest.h>

#include <random>

#include "tvip/linalg.hpp"

using namespace tvip;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Matrix random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
  }
  return Eigen::HouseholderQR<Matrix>(a).householderQ();
}

// SPD with spectrum spread up to the requested condition number
Matrix random_spd(int n, double cond, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const Matrix q = random_orthogonal(n, rng);
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = std::pow(cond, uni(rng));
  Matrix m = q * d.asDiagonal() * q.transpose();
  return Matrix(0.5 * (m + m.transpose()));  // exact symmetry
}

}  // namespace

TEST_CASE("solve_spd pinned examples") {
  CHECK(linalg::solve_spd(Matrix::Identity(2, 2), vec2(3, 4)).isApprox(vec2(3, 4), 1e-14));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  CHECK(linalg::solve_spd(d, vec2(2, 4)).isApprox(vec2(1, 1), 1e-14));

  Matrix m(2, 2);
  m << 2, 1, 1, 2;
  CHECK(linalg::solve_spd(m, vec2(3, 3)).isApprox(vec2(1, 1), 1e-14));
}

TEST_CASE("solve_spd rejects bad input") {
  Matrix indef(2, 2);
  indef << 1, 0, 0, -1;
  // Tikhonov retry cannot rescue an indefinite matrix
  CHECK_THROWS_AS(linalg::solve_spd(indef, vec2(1, 1)), SingularSystem);
  try {
    linalg::CholeskyFactor::compute(indef, Exec::Serial);
    CHECK(false);
  } catch (const SingularSystem& e) {
    CHECK(e.pivot_index == 1);
  }

  Matrix skew(2, 2);
  skew << 1, 2, 0, 1;
  CHECK_THROWS_AS(linalg::solve_spd(skew, vec2(1, 1)), SolverError);
}

TEST_CASE("solve_kkt pinned examples") {
  Matrix a1(1, 2);
  a1 << 1, 1;
  Vector rhs1(3);
  rhs1 << 0, 0, -1;
  Vector z1 = linalg::solve_kkt(Matrix::Identity(2, 2), a1, rhs1);
  CHECK(z1(0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(z1(1) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(z1(2) == doctest::Approx(0.5).epsilon(1e-12));

  Matrix a2(1, 2);
  a2 << 1, 0;
  Vector rhs2(3);
  rhs2 << 1, 0, 0;
  Vector z2 = linalg::solve_kkt(Matrix::Identity(2, 2), a2, rhs2);
  CHECK(z2(0) == doctest::Approx(0.0));
  CHECK(z2(1) == doctest::Approx(0.0));
  CHECK(z2(2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solve_kkt with empty equality block equals solve_spd bitwise") {
  std::mt19937_64 rng(5);
  const Matrix m = random_spd(7, 1e3, rng);
  Vector rhs(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 7; ++i) rhs(i) = gauss(rng);
  const Vector a = linalg::solve_spd(m, rhs);
  const Vector b = linalg::solve_kkt(m, Matrix::Zero(0, 7), rhs);
  for (int i = 0; i < 7; ++i) CHECK(a(i) == b(i));
}

TEST_CASE("solve_spd residual bound on random well-conditioned instances") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 24);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size(rng);
    const Matrix m = random_spd(n, 1e6, rng);
    Vector rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = gauss(rng);
    const Vector x = linalg::solve_spd(m, rhs);
    CHECK((m * x - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("solve_kkt residual bound on random full-rank instances") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 20);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = size(rng);
    std::uniform_int_distribution<int> qdist(1, n - 1);
    const int q = qdist(rng);
    const Matrix h = random_spd(n, 1e4, rng);
    Matrix a(q, n);
    for (int i = 0; i < q; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
    }
    Vector rhs(n + q);
    for (int i = 0; i < n + q; ++i) rhs(i) = gauss(rng);

    Matrix kkt = Matrix::Zero(n + q, n + q);
    kkt.topLeftCorner(n, n) = h;
    kkt.topRightCorner(n, q) = a.transpose();
    kkt.bottomLeftCorner(q, n) = a;
    const Vector z = linalg::solve_kkt(h, a, rhs);
    CHECK((kkt * z - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("rank-deficient equality block is rejected") {
  Matrix a(2, 3);
  a << 1, 1, 0, 1, 1, 0;  // duplicated row
  Vector rhs(5);
  rhs.setOnes();
  CHECK_THROWS_AS(linalg::solve_kkt(Matrix::Identity(3, 3), a, rhs), SingularSystem);
}

TEST_CASE("parallel kernels match the serial reference bitwise") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Matrix m = random_spd(64, 1e5, rng);
  Vector rhs(64);
  for (int i = 0; i < 64; ++i) rhs(i) = gauss(rng);

  const Vector xs = linalg::solve_spd(m, rhs, Exec::Serial);
  const Vector xp = linalg::solve_spd(m, rhs, Exec::Parallel);
  for (int i = 0; i < 64; ++i) CHECK(xs(i) == xp(i));

  Matrix a(5, 64);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 64; ++j) a(i, j) = gauss(rng);
  }
  Vector rhs2(69);
  for (int i = 0; i < 69; ++i) rhs2(i) = gauss(rng);
  const Vector zs = linalg::solve_kkt(m, a, rhs2, Exec::Serial);
  const Vector zp = linalg::solve_kkt(m, a, rhs2, Exec::Parallel);
  for (int i = 0; i < 69; ++i) CHECK(zs(i) == zp(i));

  Matrix b(40, 32);
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 32; ++j) b(i, j) = gauss(rng);
  }
  Matrix outs = Matrix::Zero(32, 32);
  Matrix outp = Matrix::Zero(32, 32);
  linalg::syrk_add(outs, b, Exec::Serial);
  linalg::syrk_add(outp, b, Exec::Parallel);
  CHECK((outs - outp).cwiseAbs().maxCoeff() == 0.0);
  CHECK(linalg::asymmetry(outs) == 0.0);
}
