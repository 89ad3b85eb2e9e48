#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "tvip/integrator.hpp"
#include "tvip/problem.hpp"

namespace tvip::cli {

// exit codes per contract
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitIo = 4;

struct RunConfig {
  std::string scenario;           // tvqp | l1ls | robot | custom
  std::string mode;               // dynamics mode, or snipm|anipm|compare for l1ls
  std::string preset;             // tvqp: paper; l1ls: desk|paper; robot: static|moving
  std::uint64_t seed = 7;
  std::optional<double> tau;
  std::optional<double> alpha;
  std::optional<double> gamma_c;
  std::optional<double> gamma_s;
  std::optional<double> c0;
  std::optional<double> s0;
  std::optional<double> t_end;
  std::optional<double> eta;      // robust-mode noise bound
  std::string start;              // comma-separated initial point
  std::string out = "run_output";
  std::string format = "csv";     // csv | json | both
  std::string config_path;        // custom scenario definition
  int threads = 0;                // 0 => serial kernels
};

int run(const RunConfig& config);

// Generic trajectory serialization: header + one row per sample, floats at 17
// significant digits; JSON mirrors the same fields. Throws on empty input or
// IO failure.
void write_trajectory(const Trajectory& traj, const std::string& format,
                      const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

std::string schema_text();

// Flat key-value config document. '#' starts a comment; keys are
// case-sensitive; vectors are whitespace-separated numbers.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Time-varying quadratic family from a parsed config:
//   f0 = 1/2 x^T Q x + (lin0 + lin_t t + lin_sin sin(wt) + lin_cos cos(wt))^T x
//   ineq i: a^T x + d0 + d_t t + d_sin sin(w_i t) + d_cos cos(w_i t) <= 0
//   eq row j: a^T x = b0 + b_t t + b_sin sin(w_j t) + b_cos cos(w_j t)
TimeVaryingProblem build_custom_problem(const std::map<std::string, std::string>& kv);

}  // namespace tvip::cli
