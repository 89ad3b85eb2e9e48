#pragma once

#include "tvip/types.hpp"

namespace tvip::linalg {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Lower-triangular Cholesky factorization of a symmetric positive definite
// matrix. The parallel path distributes the column updates; every entry sees
// the same accumulation order as the serial path, so results are bitwise
// identical across policies.
class CholeskyFactor {
 public:
  static CholeskyFactor compute(const Matrix& m, Exec exec);  // SingularSystem on d <= 0
  Vector solve(const Vector& rhs) const;
  // diag-based spread, a cheap condition proxy: (max_j L_jj / min_j L_jj)^2
  double condition_estimate() const;

 private:
  RowMatrix lower_;
};

// LU with partial pivoting for the symmetric-indefinite KKT blocks.
class LuFactor {
 public:
  static LuFactor compute(const Matrix& m, Exec exec);  // SingularSystem on zero pivot
  Vector solve(const Vector& rhs) const;

 private:
  RowMatrix lu_;
  std::vector<int> perm_;
};

// max |M - M^T|; symmetric solves reject anything above tolerance.
double asymmetry(const Matrix& m);

// Solves M w = rhs for symmetric positive definite M with one step of
// iterative refinement. A failed factorization is retried once with a
// Tikhonov shift of 1e-10 on the diagonal (logged).
Vector solve_spd(const Matrix& m, const Vector& rhs, Exec exec = Exec::Serial);

// Solves the block system [[H, A^T], [A, 0]] z = rhs. H must be symmetric,
// A full row rank with q < n. q == 0 degenerates to solve_spd on H exactly.
Vector solve_kkt(const Matrix& h, const Matrix& a, const Vector& rhs,
                 Exec exec = Exec::Serial);

// out += B^T B for p x n B, written on both triangles. Parallel over output
// rows, deterministic for a fixed policy.
void syrk_add(Matrix& out, const Matrix& b, Exec exec = Exec::Serial);

}  // namespace tvip::linalg
