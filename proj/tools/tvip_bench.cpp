// Serial vs OpenMP timing for the dense kernels and the oracle batch.
#include <omp.h>

#include <cstdio>
#include <random>

#include "tvip/barrier.hpp"
#include "tvip/linalg.hpp"
#include "tvip/oracle.hpp"
#include "tvip/scenarios.hpp"

using namespace tvip;

namespace {

Matrix random_spd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
  }
  Matrix m = a.transpose() * a;
  m.diagonal().array() += static_cast<double>(n);
  return m;
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = omp_get_wtime();
    fn();
    best = std::min(best, omp_get_wtime() - t0);
  }
  return best;
}

void bench_spd(int n) {
  std::mt19937_64 rng(17);
  const Matrix m = random_spd(n, rng);
  Vector rhs(n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < n; ++i) rhs(i) = gauss(rng);

  const double serial = time_best_of(3, [&] { linalg::solve_spd(m, rhs, Exec::Serial); });
  const double parallel =
      time_best_of(3, [&] { linalg::solve_spd(m, rhs, Exec::Parallel); });
  const Vector a = linalg::solve_spd(m, rhs, Exec::Serial);
  const Vector b = linalg::solve_spd(m, rhs, Exec::Parallel);
  std::printf("solve_spd      n=%5d  serial %8.2f ms  parallel %8.2f ms  speedup %.2fx  max|diff|=%g\n",
              n, serial * 1e3, parallel * 1e3, serial / parallel,
              (a - b).cwiseAbs().maxCoeff());
}

void bench_barrier(int m_rows, int n_cols) {
  const auto build = scenarios::build_l1ls(3, m_rows, n_cols, 5, 0.1, 2.0);
  Vector w = Vector::Zero(2 * n_cols);
  w.tail(n_cols).setOnes();
  const DerivativeBundle bundle = eval_derivative_bundle(build.problem, w, 0.0);
  const SchedulePoint sched{10.0, 10.0, 0.0, 0.0};

  const double serial =
      time_best_of(3, [&] { eval_phi(bundle, sched, Exec::Serial); });
  const double parallel =
      time_best_of(3, [&] { eval_phi(bundle, sched, Exec::Parallel); });
  const PhiEvaluation a = eval_phi(bundle, sched, Exec::Serial);
  const PhiEvaluation b = eval_phi(bundle, sched, Exec::Parallel);
  std::printf("eval_phi       p=%5d  serial %8.2f ms  parallel %8.2f ms  speedup %.2fx  max|diff|=%g\n",
              2 * n_cols, serial * 1e3, parallel * 1e3, serial / parallel,
              (a.hess - b.hess).cwiseAbs().maxCoeff());
}

void bench_oracle_batch() {
  const TimeVaryingProblem problem = scenarios::build_tvqp();
  const auto preset = scenarios::tvqp_paper_preset();
  InitialState init;
  init.x = preset.x0;
  const Trajectory traj =
      integrate(problem, Mode::Barrier, preset.gains, preset.schedules, preset.config, init);

  oracle::OracleConfig serial_cfg;
  oracle::OracleConfig parallel_cfg;
  parallel_cfg.exec = Exec::Parallel;
  const double serial =
      time_best_of(2, [&] { oracle::tracking_error(traj, problem, 1, serial_cfg); });
  const double parallel =
      time_best_of(2, [&] { oracle::tracking_error(traj, problem, 1, parallel_cfg); });
  std::printf("oracle batch   k=%5zu  serial %8.2f ms  parallel %8.2f ms  speedup %.2fx\n",
              traj.samples.size(), serial * 1e3, parallel * 1e3, serial / parallel);
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", omp_get_max_threads());
  bench_spd(256);
  bench_spd(512);
  bench_spd(1024);
  bench_barrier(64, 256);
  bench_barrier(128, 512);
  bench_oracle_batch();
  return 0;
}
