#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>

#include "tvip/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tvip: prediction-correction interior-point dynamics for "
               "time-varying convex optimization"};

  tvip::cli::RunConfig config;
  bool schema = false;
  double tau = 0.0, alpha = 0.0, gamma_c = 0.0, gamma_s = 0.0;
  double c0 = 0.0, s0 = 0.0, t_end = 0.0, eta = 0.0;

  app.add_option("--scenario", config.scenario, "tvqp | l1ls | robot | custom");
  app.add_option("--preset", config.preset,
                 "tvqp: paper; l1ls: desk|paper; robot: static|moving");
  app.add_option("--mode", config.mode,
                 "dynamics mode (unconstrained|equality|barrier|combined|"
                 "second_order|robust) or l1ls mode (snipm|anipm|compare)");
  app.add_option("--seed", config.seed, "instance seed");
  auto* opt_tau = app.add_option("--tau", tau, "integrator step size");
  auto* opt_alpha = app.add_option("--alpha", alpha, "correction gain");
  auto* opt_gc = app.add_option("--gamma-c", gamma_c, "barrier growth rate");
  auto* opt_gs = app.add_option("--gamma-s", gamma_s, "slack decay rate");
  auto* opt_c0 = app.add_option("--c0", c0, "initial barrier parameter");
  auto* opt_s0 = app.add_option("--s0", s0, "initial slack");
  auto* opt_tend = app.add_option("--t-end", t_end, "horizon");
  auto* opt_eta = app.add_option("--eta", eta, "robust-mode noise bound");
  app.add_option("--start", config.start, "initial point, comma separated");
  app.add_option("--out", config.out, "output path base (extension appended)");
  app.add_option("--format", config.format, "csv | json | both");
  app.add_option("--config", config.config_path, "custom scenario definition file");
  app.add_option("--threads", config.threads, "OpenMP threads (0 = serial kernels)");
  app.add_flag("--schema", schema, "print the output schema and exit");

  CLI11_PARSE(app, argc, argv);

  if (schema) {
    std::fputs(tvip::cli::schema_text().c_str(), stdout);
    return tvip::cli::kExitOk;
  }
  if (config.scenario.empty()) {
    std::fputs("error: --scenario is required (or use --schema)\n", stderr);
    return tvip::cli::kExitConfig;
  }

  if (*opt_tau) config.tau = tau;
  if (*opt_alpha) config.alpha = alpha;
  if (*opt_gc) config.gamma_c = gamma_c;
  if (*opt_gs) config.gamma_s = gamma_s;
  if (*opt_c0) config.c0 = c0;
  if (*opt_s0) config.s0 = s0;
  if (*opt_tend) config.t_end = t_end;
  if (*opt_eta) config.eta = eta;

  return tvip::cli::run(config);
}
