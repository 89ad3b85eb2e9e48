#include "tvip/cli.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "tvip/linalg.hpp"
#include "tvip/log.hpp"
#include "tvip/oracle.hpp"
#include "tvip/scenarios.hpp"

namespace tvip::cli {

namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::istringstream iss(text);
  double v = 0.0;
  while (iss >> v) out.push_back(v);
  return out;
}

Vector parse_point(const std::string& text) {
  std::string cleaned = text;
  for (char& ch : cleaned) {
    if (ch == ',') ch = ' ';
  }
  const std::vector<double> values = parse_numbers(cleaned);
  Vector out(values.size());
  for (size_t i = 0; i < values.size(); ++i) out(i) = values[i];
  return out;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << body;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace

// ---------- generic trajectory serialization ----------

namespace {

std::string trajectory_csv(const Trajectory& traj) {
  const TrajectorySample& first = traj.samples.front();
  const int n = static_cast<int>(first.x.size());
  const int q = static_cast<int>(first.nu.size());
  const int ny = static_cast<int>(first.y.size());
  const int p = static_cast<int>(first.psi.size());

  std::string body;
  body += "t";
  for (int i = 0; i < n; ++i) body += ",x" + std::to_string(i + 1);
  for (int i = 0; i < q; ++i) body += ",nu" + std::to_string(i + 1);
  for (int i = 0; i < ny; ++i) body += ",y" + std::to_string(i + 1);
  for (int i = 0; i < p; ++i) body += ",psi" + std::to_string(i + 1);
  body += ",c,s,grad_norm";
  for (int i = 0; i < p; ++i) body += ",lambda" + std::to_string(i + 1);
  body += ",guard_backtracks,regularized\n";

  for (const TrajectorySample& sample : traj.samples) {
    body += fmt17(sample.t);
    for (int i = 0; i < n; ++i) body += "," + fmt17(sample.x(i));
    for (int i = 0; i < q; ++i) body += "," + fmt17(sample.nu(i));
    for (int i = 0; i < ny; ++i) body += "," + fmt17(sample.y(i));
    for (int i = 0; i < p; ++i) body += "," + fmt17(sample.psi(i));
    body += "," + fmt17(sample.c) + "," + fmt17(sample.s) + "," + fmt17(sample.grad_norm);
    for (int i = 0; i < p; ++i) body += "," + fmt17(sample.lambda_hat(i));
    body += "," + std::to_string(sample.guard_backtracks);
    body += sample.regularized ? ",1\n" : ",0\n";
  }
  return body;
}

json sample_json(const TrajectorySample& sample) {
  json j;
  j["t"] = sample.t;
  j["x"] = std::vector<double>(sample.x.begin(), sample.x.end());
  j["nu"] = std::vector<double>(sample.nu.begin(), sample.nu.end());
  j["y"] = std::vector<double>(sample.y.begin(), sample.y.end());
  j["psi"] = std::vector<double>(sample.psi.begin(), sample.psi.end());
  j["c"] = sample.c;
  j["s"] = sample.s;
  j["grad_norm"] = sample.grad_norm;
  j["lambda"] = std::vector<double>(sample.lambda_hat.begin(), sample.lambda_hat.end());
  j["guard_backtracks"] = sample.guard_backtracks;
  j["regularized"] = sample.regularized;
  return j;
}

}  // namespace

void write_trajectory(const Trajectory& traj, const std::string& format,
                      const std::string& path) {
  if (traj.samples.empty()) {
    throw std::invalid_argument("write_trajectory: trajectory is empty");
  }
  if (format == "csv" || format == "both") {
    write_file(path + ".csv", trajectory_csv(traj));
  }
  if (format == "json" || format == "both") {
    json j;
    j["error"] = traj.error;
    j["samples"] = json::array();
    for (const TrajectorySample& sample : traj.samples) {
      j["samples"].push_back(sample_json(sample));
    }
    write_file(path + ".json", j.dump(2) + "\n");
  }
  if (format != "csv" && format != "json" && format != "both") {
    throw ConfigError("unknown format: " + format);
  }
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw IoError("empty trajectory file " + path);

  int n = 0, q = 0, ny = 0, p = 0;
  {
    std::istringstream iss(header);
    std::string token;
    while (std::getline(iss, token, ',')) {
      if (token.rfind("x", 0) == 0 && token != "x") ++n;
      else if (token.rfind("nu", 0) == 0) ++q;
      else if (token.rfind("y", 0) == 0) ++ny;
      else if (token.rfind("psi", 0) == 0) ++p;
    }
  }

  Trajectory traj;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::string token;
    std::vector<double> values;
    while (std::getline(iss, token, ',')) values.push_back(std::stod(token));
    size_t at = 0;
    TrajectorySample sample;
    sample.t = values[at++];
    sample.x.resize(n);
    for (int i = 0; i < n; ++i) sample.x(i) = values[at++];
    sample.nu.resize(q);
    for (int i = 0; i < q; ++i) sample.nu(i) = values[at++];
    sample.y.resize(ny);
    for (int i = 0; i < ny; ++i) sample.y(i) = values[at++];
    sample.psi.resize(p);
    for (int i = 0; i < p; ++i) sample.psi(i) = values[at++];
    sample.c = values[at++];
    sample.s = values[at++];
    sample.grad_norm = values[at++];
    sample.lambda_hat.resize(p);
    for (int i = 0; i < p; ++i) sample.lambda_hat(i) = values[at++];
    sample.guard_backtracks = static_cast<int>(values[at++]);
    sample.regularized = values[at++] != 0.0;
    traj.samples.push_back(std::move(sample));
  }
  return traj;
}

// ---------- config file ----------

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      }
      continue;
    }
    auto trim = [](std::string s) {
      const size_t b = s.find_first_not_of(" \t\r");
      const size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    }
    kv[key] = value;
  }
  return kv;
}

namespace {

double kv_num(const std::map<std::string, std::string>& kv, const std::string& key,
              double fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : std::stod(it->second);
}

Vector kv_vec(const std::map<std::string, std::string>& kv, const std::string& key,
              int size, bool required) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    if (required) throw ConfigError("config: missing key " + key);
    return Vector::Zero(size);
  }
  const std::vector<double> values = parse_numbers(it->second);
  if (static_cast<int>(values.size()) != size) {
    throw ConfigError("config: key " + key + " expects " + std::to_string(size) +
                      " numbers");
  }
  Vector out(size);
  for (int i = 0; i < size; ++i) out(i) = values[static_cast<size_t>(i)];
  return out;
}

}  // namespace

TimeVaryingProblem build_custom_problem(const std::map<std::string, std::string>& kv) {
  auto it = kv.find("n");
  if (it == kv.end()) throw ConfigError("config: missing key n");
  const int n = std::stoi(it->second);
  if (n < 1) throw ConfigError("config: n must be >= 1");

  const Vector q_flat = kv_vec(kv, "Q", n * n, true);
  auto q_mat = std::make_shared<Matrix>(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) (*q_mat)(i, j) = q_flat(i * n + j);
  }
  if (linalg::asymmetry(*q_mat) > 1e-12) throw ConfigError("config: Q must be symmetric");

  const auto lin0 = std::make_shared<Vector>(kv_vec(kv, "lin0", n, false));
  const auto lin_t = std::make_shared<Vector>(kv_vec(kv, "lin_t", n, false));
  const auto lin_sin = std::make_shared<Vector>(kv_vec(kv, "lin_sin", n, false));
  const auto lin_cos = std::make_shared<Vector>(kv_vec(kv, "lin_cos", n, false));
  const double omega = kv_num(kv, "omega", 1.0);

  TimeVaryingProblem problem;
  problem.dimension = n;
  {
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(*q_mat);
    const double min_eig = eig.eigenvalues().minCoeff();
    problem.strong_convexity = kv_num(kv, "m", min_eig);
    if (!(problem.strong_convexity > 0.0)) {
      throw ConfigError("config: objective is not strongly convex (min eig of Q = " +
                        std::to_string(min_eig) + ")");
    }
  }

  auto lin_at = [lin0, lin_t, lin_sin, lin_cos, omega](double t) {
    return Vector((*lin0) + t * (*lin_t) + std::sin(omega * t) * (*lin_sin) +
                  std::cos(omega * t) * (*lin_cos));
  };
  auto lin_rate = [lin_t, lin_sin, lin_cos, omega](double t) {
    return Vector((*lin_t) + omega * std::cos(omega * t) * (*lin_sin) -
                  omega * std::sin(omega * t) * (*lin_cos));
  };

  problem.objective.value = [q_mat, lin_at](const Vector& x, double t) {
    return 0.5 * x.dot((*q_mat) * x) + lin_at(t).dot(x);
  };
  problem.objective.gradient = [q_mat, lin_at](const Vector& x, double t) {
    return Vector((*q_mat) * x + lin_at(t));
  };
  problem.objective.hessian = [q_mat](const Vector&, double) { return *q_mat; };
  problem.objective.time_partial = [lin_rate](const Vector& x, double t) {
    return lin_rate(t).dot(x);
  };
  problem.objective.grad_time_partial = [lin_rate](const Vector&, double t) {
    return lin_rate(t);
  };

  const int p = static_cast<int>(kv_num(kv, "ineq_count", 0.0));
  for (int i = 0; i < p; ++i) {
    const std::string base = "ineq" + std::to_string(i) + "_";
    const auto a = std::make_shared<Vector>(kv_vec(kv, base + "a", n, true));
    const double d0 = kv_num(kv, base + "d0", 0.0);
    const double dt = kv_num(kv, base + "dt", 0.0);
    const double dsin = kv_num(kv, base + "dsin", 0.0);
    const double dcos = kv_num(kv, base + "dcos", 0.0);
    const double w = kv_num(kv, base + "omega", 1.0);
    ScalarField fi;
    fi.value = [a, d0, dt, dsin, dcos, w](const Vector& x, double t) {
      return a->dot(x) + d0 + dt * t + dsin * std::sin(w * t) + dcos * std::cos(w * t);
    };
    fi.gradient = [a](const Vector&, double) { return *a; };
    fi.time_partial = [dt, dsin, dcos, w](const Vector&, double t) {
      return dt + w * dsin * std::cos(w * t) - w * dcos * std::sin(w * t);
    };
    fi.grad_time_partial = [n](const Vector&, double) {
      return Vector(Vector::Zero(n));
    };
    problem.inequalities.push_back(std::move(fi));
  }

  const int q_rows = static_cast<int>(kv_num(kv, "eq_count", 0.0));
  if (q_rows > 0) {
    if (q_rows >= n) throw ConfigError("config: eq_count must be < n");
    auto a_rows = std::make_shared<Matrix>(q_rows, n);
    auto b0 = std::make_shared<Vector>(q_rows);
    auto bt = std::make_shared<Vector>(q_rows);
    auto bsin = std::make_shared<Vector>(q_rows);
    auto bcos = std::make_shared<Vector>(q_rows);
    auto bw = std::make_shared<Vector>(q_rows);
    for (int i = 0; i < q_rows; ++i) {
      const std::string base = "eq" + std::to_string(i) + "_";
      a_rows->row(i) = kv_vec(kv, base + "a", n, true).transpose();
      (*b0)(i) = kv_num(kv, base + "b0", 0.0);
      (*bt)(i) = kv_num(kv, base + "bt", 0.0);
      (*bsin)(i) = kv_num(kv, base + "bsin", 0.0);
      (*bcos)(i) = kv_num(kv, base + "bcos", 0.0);
      (*bw)(i) = kv_num(kv, base + "omega", 1.0);
    }
    AffineEquality eq;
    eq.rows = q_rows;
    eq.matrix = [a_rows](double) { return *a_rows; };
    eq.rhs = [b0, bt, bsin, bcos, bw, q_rows](double t) {
      Vector b(q_rows);
      for (int i = 0; i < q_rows; ++i) {
        b(i) = (*b0)(i) + (*bt)(i)*t + (*bsin)(i)*std::sin((*bw)(i)*t) +
               (*bcos)(i)*std::cos((*bw)(i)*t);
      }
      return b;
    };
    eq.matrix_dot = [a_rows](double) { return Matrix(Matrix::Zero(a_rows->rows(), a_rows->cols())); };
    eq.rhs_dot = [bt, bsin, bcos, bw, q_rows](double t) {
      Vector b(q_rows);
      for (int i = 0; i < q_rows; ++i) {
        b(i) = (*bt)(i) + (*bw)(i) * ((*bsin)(i)*std::cos((*bw)(i)*t) -
                                      (*bcos)(i)*std::sin((*bw)(i)*t));
      }
      return b;
    };
    problem.equality = std::move(eq);
  }
  return problem;
}

// ---------- schema ----------

std::string schema_text() {
  return R"(tvip output schema

tvqp scenario (<out>.csv):
  t            simulation time
  x1,x2        solver state
  f1           constraint value x2 - x1 - cos t (negative means feasible)
  s            slack schedule value
  c            barrier parameter
  grad_norm    ||grad Phi|| at the sample
  track_err    ||x - x*(t)|| against the static oracle solution

l1ls scenario (<out>.json / <out>.csv):
  json: {seed, snipm_iters, anipm_iters, snipm_converged, anipm_converged,
         snipm_final_gap, anipm_final_gap, gap_trace: {snipm: [...], anipm: [...]}}
  csv rows: method,iteration,gap

robot scenario (<out>.csv):
  t            simulation time
  xc1,xc2      robot center
  xhat1,xhat2  projected-goal estimate
  margin       min_i ||xc - x_i|| - r_i - r (positive means collision free)
  goal_dist    ||xc - x_d(t)||

custom scenario / generic trajectory (<out>.csv):
  t, x1..xn, [nu1..nuq], [y1..yn], [psi1..psip], c, s, grad_norm,
  [lambda1..lambdap], guard_backtracks, regularized
  JSON mirrors the same fields per sample.

custom config grammar (flat key = value, '#' comments):
  n            problem dimension (required)
  Q            n*n row-major symmetric quadratic term (required)
  lin0/lin_t/lin_sin/lin_cos  linear term pieces (n numbers each), omega
  m            strong convexity override (default: min eigenvalue of Q)
  ineq_count   number of affine inequality rows
  ineqK_a, ineqK_d0, ineqK_dt, ineqK_dsin, ineqK_dcos, ineqK_omega
  eq_count     number of affine equality rows (< n)
  eqK_a, eqK_b0, eqK_bt, eqK_bsin, eqK_bcos, eqK_omega
  mode, tau, t_end, alpha, gamma_c, gamma_s, c0, s0, start  run parameters

All floating point is serialized with 17 significant digits; identical
configs and seeds give byte-identical files.
)";
}

// ---------- run ----------

namespace {

Exec pick_exec(const RunConfig& config) {
  if (config.threads > 0) {
    omp_set_num_threads(config.threads);
    return Exec::Parallel;
  }
  return Exec::Serial;
}

Mode parse_mode(const std::string& name) {
  if (name == "unconstrained") return Mode::Unconstrained;
  if (name == "equality") return Mode::Equality;
  if (name == "barrier" || name.empty()) return Mode::Barrier;
  if (name == "combined") return Mode::Combined;
  if (name == "second_order") return Mode::SecondOrder;
  if (name == "robust") return Mode::Robust;
  throw ConfigError("unknown mode: " + name);
}

int run_tvqp(const RunConfig& config) {
  scenarios::TvqpPreset preset = scenarios::tvqp_paper_preset();
  if (!config.preset.empty() && config.preset != "paper") {
    throw ConfigError("tvqp: unknown preset " + config.preset);
  }
  if (config.tau) preset.config.tau = *config.tau;
  if (config.t_end) preset.config.t_end = *config.t_end;
  if (config.alpha) preset.gains.alpha = *config.alpha;
  if (config.gamma_c) preset.schedules.gamma_c = *config.gamma_c;
  if (config.gamma_s) preset.schedules.gamma_s = *config.gamma_s;
  if (config.c0) preset.schedules.c0 = *config.c0;
  if (config.s0) preset.schedules.s0 = *config.s0;
  if (!config.start.empty()) preset.x0 = parse_point(config.start);
  preset.config.exec = pick_exec(config);

  const TimeVaryingProblem problem = scenarios::build_tvqp();
  const Mode mode = parse_mode(config.mode);
  InitialState init;
  init.x = preset.x0;
  const Trajectory traj = integrate(problem, mode, preset.gains, preset.schedules,
                                    preset.config, init);
  if (traj.samples.empty()) throw SolverError("tvqp: no samples produced");

  oracle::OracleConfig oc;
  oc.exec = preset.config.exec;
  const auto errors = oracle::tracking_error(traj, problem, 1, oc);

  std::string body = "t,x1,x2,f1,s,c,grad_norm,track_err\n";
  for (size_t i = 0; i < traj.samples.size(); ++i) {
    const TrajectorySample& s = traj.samples[i];
    const double f1 = s.psi.size() > 0 ? s.s - s.psi(0)
                                       : problem.inequalities[0].value(s.x, s.t);
    body += fmt17(s.t) + "," + fmt17(s.x(0)) + "," + fmt17(s.x(1)) + "," + fmt17(f1) +
            "," + fmt17(s.s) + "," + fmt17(s.c) + "," + fmt17(s.grad_norm) + "," +
            fmt17(errors[i].error) + "\n";
  }
  if (config.format == "csv" || config.format == "both") {
    write_file(config.out + ".csv", body);
  }
  if (config.format == "json" || config.format == "both") {
    json j;
    j["error"] = traj.error;
    j["samples"] = json::array();
    for (size_t i = 0; i < traj.samples.size(); ++i) {
      json row = sample_json(traj.samples[i]);
      row["track_err"] = errors[i].error;
      j["samples"].push_back(row);
    }
    write_file(config.out + ".json", j.dump(2) + "\n");
  }
  if (!traj.ok()) {
    TVIP_LOG_ERROR("tvqp: %s", traj.error.c_str());
    return kExitSolver;
  }
  return kExitOk;
}

int run_l1ls(const RunConfig& config) {
  int m = 64, n = 256, k = 5;
  if (config.preset == "paper") {
    m = 256;
    n = 1024;
    k = 10;
  } else if (!config.preset.empty() && config.preset != "desk") {
    throw ConfigError("l1ls: unknown preset " + config.preset);
  }
  const scenarios::L1lsBuild build = scenarios::build_l1ls(config.seed, m, n, k, 0.1, 2.0);

  scenarios::IpmConfig ipm;
  ipm.exec = pick_exec(config);
  if (config.alpha) ipm.alpha = *config.alpha;
  if (config.c0) ipm.c0 = *config.c0;

  const std::string mode = config.mode.empty() ? "compare" : config.mode;
  json j;
  j["seed"] = config.seed;
  std::string csv = "method,iteration,gap\n";
  auto add = [&](scenarios::IpmMode im, const char* name) {
    const scenarios::ConvergenceReport report =
        scenarios::run_ipm_comparison(build, im, ipm);
    j[std::string(name) + "_iters"] = report.iterations;
    j[std::string(name) + "_converged"] = report.converged;
    j[std::string(name) + "_final_gap"] = report.final_gap;
    j["gap_trace"][name] = report.gap_trace;
    for (size_t i = 0; i < report.gap_trace.size(); ++i) {
      csv += std::string(name) + "," + std::to_string(i + 1) + "," +
             fmt17(report.gap_trace[i]) + "\n";
    }
    return report.converged;
  };

  bool ok = true;
  if (mode == "compare" || mode == "snipm") ok &= add(scenarios::IpmMode::Snipm, "snipm");
  if (mode == "compare" || mode == "anipm") ok &= add(scenarios::IpmMode::Anipm, "anipm");
  if (mode != "compare" && mode != "snipm" && mode != "anipm") {
    throw ConfigError("l1ls: unknown mode " + mode);
  }

  if (config.format == "json" || config.format == "both" || config.format == "csv") {
    // the JSON report is the primary artifact for this scenario
    write_file(config.out + ".json", j.dump(2) + "\n");
  }
  if (config.format == "csv" || config.format == "both") {
    write_file(config.out + ".csv", csv);
  }
  return ok ? kExitOk : kExitSolver;
}

int run_robot(const RunConfig& config) {
  scenarios::Workspace ws = scenarios::paper_workspace();
  BarrierSchedules schedules;
  dynamics::GainSettings gains;
  scenarios::RobotConfig rc;
  Vector2 start = scenarios::static_goal_starts().front();

  if (config.preset == "moving") {
    ws.controller_gain = 0.05;
    ws.goal.point = Vector2(0.0, 0.0);
    ws.goal.circle_radius = 15.0;
    ws.goal.period = 2000.0;
    gains.alpha = 30.0;
    schedules.c0 = 100.0;
    schedules.gamma_c = 0.001;
    schedules.s0 = 0.0;
    schedules.gamma_s = 0.0;
    rc.tau = 0.02;
    rc.t_end = 2000.0;
    rc.record_stride = 10;
    start = Vector2(15.0, 0.0);
  } else if (config.preset == "static" || config.preset.empty()) {
    gains.alpha = 5.0;
    schedules.c0 = 1.0;  // c(t) = e^{0.001 t}
    schedules.gamma_c = 0.001;
    schedules.s0 = 0.0;
    schedules.gamma_s = 0.0;
    rc.tau = 0.1;
    rc.t_end = 6000.0;
    rc.record_stride = 10;
  } else {
    throw ConfigError("robot: unknown preset " + config.preset);
  }
  if (config.tau) rc.tau = *config.tau;
  if (config.t_end) rc.t_end = *config.t_end;
  if (config.alpha) gains.alpha = *config.alpha;
  if (config.gamma_c) schedules.gamma_c = *config.gamma_c;
  if (config.c0) schedules.c0 = *config.c0;
  if (!config.start.empty()) {
    const Vector point = parse_point(config.start);
    if (point.size() != 2) throw ConfigError("robot: start must have two coordinates");
    start = Vector2(point(0), point(1));
  }
  rc.exec = pick_exec(config);

  const scenarios::RobotTrajectory traj =
      scenarios::robot_simulate(ws, gains, schedules, rc, start);
  if (traj.samples.empty()) throw SolverError("robot: no samples produced");

  std::string body = "t,xc1,xc2,xhat1,xhat2,margin,goal_dist\n";
  for (const scenarios::RobotSample& s : traj.samples) {
    body += fmt17(s.t) + "," + fmt17(s.x_c(0)) + "," + fmt17(s.x_c(1)) + "," +
            fmt17(s.x_hat(0)) + "," + fmt17(s.x_hat(1)) + "," + fmt17(s.margin) + "," +
            fmt17(s.goal_distance) + "\n";
  }
  if (config.format == "csv" || config.format == "both") {
    write_file(config.out + ".csv", body);
  }
  if (config.format == "json" || config.format == "both") {
    json j;
    j["error"] = traj.error;
    j["samples"] = json::array();
    for (const scenarios::RobotSample& s : traj.samples) {
      json row;
      row["t"] = s.t;
      row["xc"] = {s.x_c(0), s.x_c(1)};
      row["xhat"] = {s.x_hat(0), s.x_hat(1)};
      row["margin"] = s.margin;
      row["goal_dist"] = s.goal_distance;
      row["estimator_violation"] = s.estimator_violation;
      j["samples"].push_back(row);
    }
    write_file(config.out + ".json", j.dump(2) + "\n");
  }
  if (!traj.ok()) {
    TVIP_LOG_ERROR("robot: %s", traj.error.c_str());
    return kExitSolver;
  }
  return kExitOk;
}

int run_custom(const RunConfig& config) {
  if (config.config_path.empty()) {
    throw ConfigError("custom scenario requires --config <file>");
  }
  const auto kv = parse_config_file(config.config_path);
  const TimeVaryingProblem problem = build_custom_problem(kv);

  auto kv_str = [&](const std::string& key, const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };

  const Mode mode =
      parse_mode(!config.mode.empty() ? config.mode : kv_str("mode", "barrier"));

  BarrierSchedules schedules;
  schedules.c0 = config.c0 ? *config.c0 : kv_num(kv, "c0", 10.0);
  schedules.gamma_c = config.gamma_c ? *config.gamma_c : kv_num(kv, "gamma_c", 1.0);
  schedules.gamma_s = config.gamma_s ? *config.gamma_s : kv_num(kv, "gamma_s", 5.0);
  const double s0 = config.s0 ? *config.s0 : kv_num(kv, "s0", -1.0);
  if (s0 >= 0.0) schedules.s0 = s0;

  dynamics::GainSettings gains;
  gains.alpha = config.alpha ? *config.alpha : kv_num(kv, "alpha", 5.0);
  gains.eta_bound = config.eta ? *config.eta : kv_num(kv, "eta", 0.0);
  gains.alpha0 = kv_num(kv, "alpha0", std::max(1.0, gains.eta_bound * 2.0));
  gains.epsilon = kv_num(kv, "epsilon", 1e-2);
  gains.gamma_filter = kv_num(kv, "gamma_filter", 1.0);

  IntegratorConfig ic;
  ic.tau = config.tau ? *config.tau : kv_num(kv, "tau", 0.01);
  ic.t_end = config.t_end ? *config.t_end : kv_num(kv, "t_end", 5.0);
  ic.exec = pick_exec(config);

  InitialState init;
  const std::string start = !config.start.empty() ? config.start : kv_str("start", "");
  if (start.empty()) {
    init.x = Vector::Zero(problem.dimension);
  } else {
    init.x = parse_point(start);
    if (init.x.size() != problem.dimension) {
      throw ConfigError("custom: start dimension mismatch");
    }
  }

  PredictionEstimator estimator = nullptr;
  if (mode == Mode::Robust && gains.eta_bound > 0.0) {
    // deterministic bounded disturbance for reproducible robust runs
    const double eta = gains.eta_bound;
    const std::uint64_t seed = config.seed;
    estimator = [eta, seed](double t, const Vector& d_dt) {
      std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(t * 1e6));
      std::normal_distribution<double> gauss(0.0, 1.0);
      Vector err(d_dt.size());
      for (Eigen::Index i = 0; i < err.size(); ++i) err(i) = gauss(rng);
      const double norm = err.norm();
      if (norm > 0.0) err *= eta / norm;
      return Vector(d_dt + err);
    };
  }

  const Trajectory traj = integrate(problem, mode, gains, schedules, ic, init, estimator);
  if (traj.samples.empty()) throw SolverError("custom: no samples produced");
  write_trajectory(traj, config.format, config.out);
  if (!traj.ok()) {
    TVIP_LOG_ERROR("custom: %s", traj.error.c_str());
    return kExitSolver;
  }
  return kExitOk;
}

void emit_error_record(const char* type, const std::string& message) {
  json j;
  j["error"]["type"] = type;
  j["error"]["message"] = message;
  std::fprintf(stderr, "%s\n", j.dump().c_str());
}

}  // namespace

int run(const RunConfig& config) {
  try {
    if (config.scenario == "tvqp") return run_tvqp(config);
    if (config.scenario == "l1ls") return run_l1ls(config);
    if (config.scenario == "robot") return run_robot(config);
    if (config.scenario == "custom") return run_custom(config);
    throw ConfigError("unknown scenario: " + config.scenario);
  } catch (const ConfigError& e) {
    emit_error_record("config", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    emit_error_record("config", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    emit_error_record("io", e.what());
    return kExitIo;
  } catch (const SolverError& e) {
    emit_error_record("solver", e.what());
    return kExitSolver;
  }
}

}  // namespace tvip::cli
