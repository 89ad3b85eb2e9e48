#include "tvip/linalg.hpp"

#include <cmath>
#include <limits>

#include "tvip/log.hpp"

namespace tvip::linalg {

namespace {

constexpr double kTikhonov = 1e-10;

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

double asymmetry(const Matrix& m) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
    }
  }
  return worst;
}

// ---------- Cholesky ----------

CholeskyFactor CholeskyFactor::compute(const Matrix& m, Exec exec) {
  const int n = static_cast<int>(m.rows());
  CholeskyFactor factor;
  RowMatrix& l = factor.lower_;
  l = m;  // lower triangle is consumed in place

  for (int j = 0; j < n; ++j) {
    double d = l(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw SingularSystem(j, "solve_spd: non-positive pivot at index " + std::to_string(j));
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    // Column update below the diagonal: rows are independent given column j,
    // and each entry accumulates in the same k order as the serial loop.
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
      for (int i = j + 1; i < n; ++i) {
        double sum = l(i, j);
        for (int k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
        l(i, j) = sum / ljj;
      }
    } else {
      for (int i = j + 1; i < n; ++i) {
        double sum = l(i, j);
        for (int k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
        l(i, j) = sum / ljj;
      }
    }
  }
  return factor;
}

Vector CholeskyFactor::solve(const Vector& rhs) const {
  const int n = static_cast<int>(lower_.rows());
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    double sum = rhs(i);
    for (int k = 0; k < i; ++k) sum -= lower_(i, k) * y(k);
    y(i) = sum / lower_(i, i);
  }
  Vector x(n);
  for (int i = n - 1; i >= 0; --i) {
    double sum = y(i);
    for (int k = i + 1; k < n; ++k) sum -= lower_(k, i) * x(k);
    x(i) = sum / lower_(i, i);
  }
  return x;
}

double CholeskyFactor::condition_estimate() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (Eigen::Index j = 0; j < lower_.rows(); ++j) {
    lo = std::min(lo, lower_(j, j));
    hi = std::max(hi, lower_(j, j));
  }
  return (hi / lo) * (hi / lo);
}

// ---------- LU with partial pivoting ----------

LuFactor LuFactor::compute(const Matrix& m, Exec exec) {
  const int n = static_cast<int>(m.rows());
  LuFactor factor;
  RowMatrix& a = factor.lu_;
  a = m;
  factor.perm_.resize(n);
  for (int i = 0; i < n; ++i) factor.perm_[i] = i;

  for (int k = 0; k < n; ++k) {
    int pivot_row = k;
    double pivot_mag = std::abs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double mag = std::abs(a(i, k));
      if (mag > pivot_mag) {
        pivot_mag = mag;
        pivot_row = i;
      }
    }
    if (!(pivot_mag > 0.0) || !std::isfinite(pivot_mag)) {
      throw SingularSystem(k, "solve_kkt: zero pivot at index " + std::to_string(k));
    }
    if (pivot_row != k) {
      a.row(k).swap(a.row(pivot_row));
      std::swap(factor.perm_[k], factor.perm_[pivot_row]);
    }
    const double pivot = a(k, k);
    // Trailing update, one row per task; identical per-entry order either way.
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
      for (int i = k + 1; i < n; ++i) {
        const double mult = a(i, k) / pivot;
        a(i, k) = mult;
        for (int j = k + 1; j < n; ++j) a(i, j) -= mult * a(k, j);
      }
    } else {
      for (int i = k + 1; i < n; ++i) {
        const double mult = a(i, k) / pivot;
        a(i, k) = mult;
        for (int j = k + 1; j < n; ++j) a(i, j) -= mult * a(k, j);
      }
    }
  }
  return factor;
}

Vector LuFactor::solve(const Vector& rhs) const {
  const int n = static_cast<int>(lu_.rows());
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    double sum = rhs(perm_[i]);
    for (int k = 0; k < i; ++k) sum -= lu_(i, k) * y(k);
    y(i) = sum;
  }
  Vector x(n);
  for (int i = n - 1; i >= 0; --i) {
    double sum = y(i);
    for (int k = i + 1; k < n; ++k) sum -= lu_(i, k) * x(k);
    x(i) = sum / lu_(i, i);
  }
  return x;
}

// ---------- drivers ----------

namespace {

void require_symmetric(const Matrix& m, const char* who) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (asymmetry(m) > 1e-10 * scale) {
    throw SolverError(std::string(who) + ": matrix is not symmetric");
  }
  if (!all_finite(m)) {
    throw SolverError(std::string(who) + ": matrix has non-finite entries");
  }
}

Vector refine_spd(const CholeskyFactor& factor, const Matrix& m, const Vector& rhs) {
  Vector x = factor.solve(rhs);
  const Vector r = rhs - m * x;
  x += factor.solve(r);
  return x;
}

Vector refine_lu(const LuFactor& factor, const Matrix& m, const Vector& rhs) {
  Vector x = factor.solve(rhs);
  const Vector r = rhs - m * x;
  x += factor.solve(r);
  return x;
}

}  // namespace

Vector solve_spd(const Matrix& m, const Vector& rhs, Exec exec) {
  require_symmetric(m, "solve_spd");
  try {
    return refine_spd(CholeskyFactor::compute(m, exec), m, rhs);
  } catch (const SingularSystem&) {
    TVIP_LOG_INFO("solve_spd: factorization failed, retrying with Tikhonov shift %g", kTikhonov);
    Matrix shifted = m;
    shifted.diagonal().array() += kTikhonov;
    return refine_spd(CholeskyFactor::compute(shifted, exec), shifted, rhs);
  }
}

Vector solve_kkt(const Matrix& h, const Matrix& a, const Vector& rhs, Exec exec) {
  const int n = static_cast<int>(h.rows());
  const int q = static_cast<int>(a.rows());
  if (q == 0) return solve_spd(h, rhs, exec);
  if (q >= n) {
    throw SolverError("solve_kkt: requires q < n (got q=" + std::to_string(q) +
                      ", n=" + std::to_string(n) + ")");
  }
  require_symmetric(h, "solve_kkt");

  Matrix kkt = Matrix::Zero(n + q, n + q);
  kkt.topLeftCorner(n, n) = h;
  kkt.topRightCorner(n, q) = a.transpose();
  kkt.bottomLeftCorner(q, n) = a;

  try {
    return refine_lu(LuFactor::compute(kkt, exec), kkt, rhs);
  } catch (const SingularSystem&) {
    TVIP_LOG_INFO("solve_kkt: factorization failed, retrying with Tikhonov shift %g", kTikhonov);
    kkt.topLeftCorner(n, n).diagonal().array() += kTikhonov;
    return refine_lu(LuFactor::compute(kkt, exec), kkt, rhs);
  }
}

void syrk_add(Matrix& out, const Matrix& b, Exec exec) {
  const int n = static_cast<int>(b.cols());
  // Upper triangle via column dots, then mirrored: output stays exactly
  // symmetric and each entry is a single ordered reduction.
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < n; ++r) {
      for (int c = r; c < n; ++c) out(r, c) += b.col(r).dot(b.col(c));
    }
  } else {
    for (int r = 0; r < n; ++r) {
      for (int c = r; c < n; ++c) out(r, c) += b.col(r).dot(b.col(c));
    }
  }
  for (int r = 0; r < n; ++r) {
    for (int c = r + 1; c < n; ++c) out(c, r) = out(r, c);
  }
}

}  // namespace tvip::linalg
