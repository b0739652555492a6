// vqcas: batch runner for the active-space variational solvers.
// Subcommands: solve, landscape, sweep, sa-driver, calibrate.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vqcas/experiments.hpp"

namespace {

struct BackendCli {
  std::string noise_config;
  bool no_mitigate = false;
  bool no_purify = false;
  int shots = -1;
  std::int64_t seed = -1;

  void attach(CLI::App* app) {
    app->add_option("--noise-config", noise_config,
                    "noise model JSON (omit for the exact statevector backend)");
    app->add_flag("--no-mitigate", no_mitigate, "disable readout-error mitigation");
    app->add_flag("--no-purify", no_purify, "disable tomography purification");
    app->add_option("--shots", shots, "shots per measured basis (overrides the config)");
    app->add_option("--seed", seed, "RNG seed (falls back to VQCAS_SEED, then 0)");
  }

  vqcas::BackendSpec spec() const {
    vqcas::BackendSpec s;
    s.noise_config = noise_config;
    s.mitigated = !no_mitigate;
    s.purified = !no_purify;
    if (shots >= 1) s.shots = shots;
    if (seed >= 0) s.seed = static_cast<std::uint64_t>(seed);
    return s;
  }
};

void attach_optimizer(CLI::App* app, vqcas::OptimizerConfig& opt) {
  app->add_option("--rho-begin", opt.rho_begin, "initial trust radius");
  app->add_option("--rho-end", opt.rho_end, "final trust radius");
  app->add_option("--max-evaluations", opt.max_evaluations, "objective evaluation budget");
  app->add_option("--f-tolerance", opt.f_tolerance, "objective-change stop (Hartree)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"active-space variational eigensolver toolkit"};
  app.require_subcommand(1);

  // --- solve ---------------------------------------------------------------
  vqcas::SolveSpec solve;
  std::string solve_ansatz = "spin-restricted";
  std::string solve_method = "vqe";
  BackendCli solve_backend;
  auto* solve_cmd = app.add_subcommand("solve", "single-point ground/excited state solve");
  solve_cmd->add_option("--fcidump", solve.fcidump, "FCIDUMP input")->required();
  solve_cmd->add_option("--ansatz", solve_ansatz,
                        "spin-restricted | ra(d) | efficient-su2(d)");
  solve_cmd->add_option("--method", solve_method, "vqe | vqd | vqeac | casci-exact");
  solve_cmd->add_option("--states", solve.states, "number of states (S0..S_{k-1})");
  solve_cmd->add_option("--beta", solve.beta, "VQD overlap penalty");
  solve_cmd->add_option("--gamma", solve.gamma, "VQD spin penalty");
  solve_cmd->add_option("--epsilon", solve.epsilon, "VQE/AC overlap bound");
  solve_cmd->add_option("--initial-params", solve.initial_theta,
                        "starting parameters (default: the family's protocol values)");
  solve_cmd->add_option("--out", solve.out, "JSONL output path (default stdout)");
  solve_cmd->add_option("--trace", solve.trace_out, "per-evaluation trace CSV");
  solve_backend.attach(solve_cmd);
  attach_optimizer(solve_cmd, solve.opt);

  // --- landscape -----------------------------------------------------------
  vqcas::LandscapeSpec landscape;
  auto* landscape_cmd =
      app.add_subcommand("landscape", "scan the spin-restricted energy landscape");
  landscape_cmd->add_option("--fcidump", landscape.fcidump, "FCIDUMP input")->required();
  landscape_cmd->add_option("--grid", landscape.grid, "points per axis over [-pi, pi]");
  landscape_cmd->add_option("--out", landscape.out_grid, "grid CSV (theta0,theta1,energy)");
  landscape_cmd->add_option("--out-stationary", landscape.out_stationary,
                            "stationary-point report CSV");
  landscape_cmd->add_option("--out-locus", landscape.out_locus, "orthogonality locus CSV");

  // --- sweep ---------------------------------------------------------------
  vqcas::SweepSpec sweep;
  std::string sweep_ansatz = "spin-restricted";
  std::string sweep_method = "vqeac";
  BackendCli sweep_backend;
  auto* sweep_cmd = app.add_subcommand("sweep", "beta or noise-level sweeps");
  sweep_cmd->add_option("--fcidump", sweep.fcidump, "FCIDUMP input")->required();
  sweep_cmd->add_option("--ansatz", sweep_ansatz, "ansatz kind");
  sweep_cmd->add_option("--beta", sweep.betas, "beta values to sweep");
  sweep_cmd->add_option("--noise-scale", sweep.noise_scales,
                        "depolarizing scale factors to sweep");
  sweep_cmd->add_option("--method", sweep_method, "excited-state method for noise sweeps");
  sweep_cmd->add_option("--states", sweep.states, "states per sweep entry");
  sweep_cmd->add_option("--gamma", sweep.gamma, "VQD spin penalty");
  sweep_cmd->add_option("--epsilon", sweep.epsilon, "VQE/AC overlap bound");
  sweep_cmd->add_option("--out", sweep.out, "aggregate CSV path (default stdout)");
  sweep_backend.attach(sweep_cmd);
  attach_optimizer(sweep_cmd, sweep.opt);

  // --- calibrate -----------------------------------------------------------
  vqcas::CalibrateSpec calibrate;
  std::int64_t calibrate_seed = -1;
  auto* calibrate_cmd =
      app.add_subcommand("calibrate", "emit the empirical readout calibration matrix");
  calibrate_cmd->add_option("--noise-config", calibrate.noise_config,
                            "noise model JSON (default synthetic model)");
  calibrate_cmd->add_option("--qubits", calibrate.n_qubits, "register size");
  calibrate_cmd->add_option("--seed", calibrate_seed, "RNG seed");
  calibrate_cmd->add_option("--out", calibrate.out, "CSV path (default stdout)");

  // --- sa-driver -----------------------------------------------------------
  vqcas::SaDriverSpec sa;
  std::string sa_ansatz = "spin-restricted";
  std::string sa_method = "vqeac";
  BackendCli sa_backend;
  auto* sa_cmd = app.add_subcommand("sa-driver", "state-averaged CASSCF macro loop");
  sa_cmd->add_option("--fcidump", sa.fcidump, "initial FCIDUMP")->required();
  sa_cmd->add_option("--states", sa.states, "number of averaged states");
  sa_cmd->add_option("--weights", sa.casscf.weights, "state-averaging weights");
  sa_cmd->add_option("--energy-threshold", sa.casscf.energy_threshold,
                     "macro convergence threshold (Hartree)");
  sa_cmd->add_option("--max-macro-iterations", sa.casscf.max_macro_iterations,
                     "orbital-rotation budget");
  sa_cmd->add_option("--external-command", sa.casscf.external_command,
                     "orbital updater template with {fcidump} {rdm} {out}");
  sa_cmd->add_option("--ansatz", sa_ansatz, "ansatz kind");
  sa_cmd->add_option("--method", sa_method, "excited-state method: vqeac | vqd");
  sa_cmd->add_option("--beta", sa.solver.vqd.beta, "VQD overlap penalty");
  sa_cmd->add_option("--gamma", sa.solver.vqd.gamma, "VQD spin penalty");
  sa_cmd->add_option("--epsilon", sa.solver.epsilon, "VQE/AC overlap bound");
  sa_cmd->add_option("--workdir", sa.workdir, "scratch directory for the file interface");
  sa_cmd->add_option("--out", sa.out, "JSONL output path (default stdout)");
  sa_backend.attach(sa_cmd);
  attach_optimizer(sa_cmd, sa.solver.opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      solve.ansatz = vqcas::AnsatzKind::parse(solve_ansatz);
      solve.method = vqcas::parse_method(solve_method);
      solve.backend = solve_backend.spec();
      return vqcas::cmd_solve(solve, std::cerr);
    }
    if (landscape_cmd->parsed()) {
      return vqcas::cmd_landscape(landscape, std::cerr);
    }
    if (sweep_cmd->parsed()) {
      sweep.ansatz = vqcas::AnsatzKind::parse(sweep_ansatz);
      sweep.method = vqcas::parse_method(sweep_method);
      sweep.backend = sweep_backend.spec();
      return vqcas::cmd_sweep(sweep, std::cerr);
    }
    if (calibrate_cmd->parsed()) {
      if (calibrate_seed >= 0) calibrate.seed = static_cast<std::uint64_t>(calibrate_seed);
      return vqcas::cmd_calibrate(calibrate, std::cerr);
    }
    if (sa_cmd->parsed()) {
      sa.solver.kind = vqcas::AnsatzKind::parse(sa_ansatz);
      sa.solver.excited = sa_method == "vqd" ? vqcas::SolverSettings::ExcitedMethod::VQD
                                             : vqcas::SolverSettings::ExcitedMethod::VQEAC;
      if (sa.casscf.weights.empty())
        sa.casscf.weights.assign(static_cast<std::size_t>(sa.states),
                                 1.0 / static_cast<double>(sa.states));
      sa.backend = sa_backend.spec();
      return vqcas::cmd_sa_driver(sa, std::cerr);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return vqcas::exit_code::usage;
  }
  return vqcas::exit_code::usage;
}
