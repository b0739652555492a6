#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vqcas/experiments.hpp"

namespace vqcas {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("VQCAS_SEED");
  if (!raw || !*raw) return std::nullopt;
  return std::strtoull(raw, nullptr, 10);
}

struct OracleState {
  double energy = 0.0;
  double s_squared = 0.0;
};

// Exact-diagonalization reference, split into singlets and the full
// sector spectrum.
struct Oracle {
  std::vector<OracleState> all;
  std::vector<OracleState> singlets;

  double singlet_energy(int k) const {
    if (k < static_cast<int>(singlets.size())) return singlets[static_cast<std::size_t>(k)].energy;
    if (k < static_cast<int>(all.size())) return all[static_cast<std::size_t>(k)].energy;
    return std::numeric_limits<double>::quiet_NaN();
  }
};

Oracle compute_oracle(const FcidumpData& data) {
  const SectorSpec sector = data.sector();
  const auto dets = enumerate_determinants(data.integrals.n_orbitals(), sector);
  const auto states = exact_casci(data.integrals, sector, static_cast<int>(dets.size()));
  Oracle oracle;
  for (const CasciState& s : states) {
    const double s2 = casci_spin_squared(s.coefficients, data.integrals.n_orbitals(), sector);
    oracle.all.push_back({s.energy, s2});
    if (s2 < 0.5) oracle.singlets.push_back({s.energy, s2});
  }
  return oracle;
}

std::ofstream open_or_throw(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_trace(const std::filesystem::path& path,
                 const std::vector<std::pair<int, OptResult>>& traces) {
  std::ofstream out = open_or_throw(path);
  out << "state,evaluation,f";
  if (!traces.empty() && !traces[0].second.history.empty()) {
    for (std::size_t i = 0; i < traces[0].second.history[0].first.size(); ++i)
      out << ",x" << i;
  }
  out << "\n";
  for (const auto& [state, opt] : traces) {
    for (std::size_t e = 0; e < opt.history.size(); ++e) {
      out << state << "," << e << "," << fmt(opt.history[e].second);
      for (double xi : opt.history[e].first) out << "," << fmt(xi);
      out << "\n";
    }
  }
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "vqe") return Method::Vqe;
  if (name == "vqd") return Method::Vqd;
  if (name == "vqeac" || name == "vqe-ac" || name == "vqe/ac") return Method::VqeAc;
  if (name == "casci-exact" || name == "casci") return Method::CasciExact;
  throw std::invalid_argument("unknown method '" + name + "'");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::Vqe:
      return "vqe";
    case Method::Vqd:
      return "vqd";
    case Method::VqeAc:
      return "vqeac";
    case Method::CasciExact:
      return "casci-exact";
  }
  return "?";
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& explicit_seed) {
  if (explicit_seed) return *explicit_seed;
  if (const auto env = env_seed()) return *env;
  return 0;
}

Backend BackendSpec::make(int n_qubits) const {
  if (noise_config.empty()) return Backend::statevector();
  NoiseModel nm = NoiseModel::from_file(noise_config);
  if (static_cast<int>(nm.readout.size()) < n_qubits && !nm.readout.empty())
    nm.readout.resize(static_cast<std::size_t>(n_qubits), nm.readout.back());
  if (shots) nm.shots = *shots;
  if (seed)
    nm.seed = *seed;
  else if (const auto env = env_seed())
    nm.seed = *env;
  return Backend::noisy_sampled(nm, mitigated, purified);
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

namespace {

struct StateRecord {
  int state = 0;
  SolveResult result;
};

std::vector<StateRecord> run_states(const QubitOperator& h, const QubitOperator& s2,
                                    const SolveSpec& spec, const Backend& backend) {
  const AnsatzParameters start{spec.initial_theta};
  const AnsatzParameters* start_ptr = spec.initial_theta.empty() ? nullptr : &start;
  std::vector<StateRecord> records;
  std::vector<AnsatzParameters> lower;
  for (int state = 0; state < spec.states; ++state) {
    SolveResult result;
    if (state == 0) {
      result = vqe(h, spec.ansatz, backend, spec.opt, &s2, start_ptr);
    } else if (spec.method == Method::Vqd) {
      VQDConfig vqd_cfg{spec.beta, spec.gamma};
      result = vqd(h, spec.ansatz, backend, spec.opt, lower, vqd_cfg, s2, start_ptr);
    } else {
      result = vqe_ac(h, spec.ansatz, backend, spec.opt, lower, spec.epsilon, &s2, start_ptr);
    }
    lower.push_back(result.theta_star);
    records.push_back({state, std::move(result)});
  }
  return records;
}

json solve_record(const SolveSpec& spec, const Backend& backend, int state,
                  const SolveResult& result, const Oracle& oracle) {
  const double exact = oracle.singlet_energy(state);
  const double delta = result.energy - exact;
  json j;
  j["method"] = method_name(spec.method);
  j["ansatz"] = spec.ansatz.name();
  j["backend"] = backend.is_statevector() ? "statevector" : "noisy-sampled";
  j["state"] = state;
  j["energy"] = json_number(result.energy);
  j["exact_energy"] = json_number(exact);
  j["delta_e_hartree"] = json_number(delta);
  j["delta_e_kcal"] = json_number(delta * kKcalPerHartree);
  j["s_squared"] = json_number(result.s_squared);
  j["theta"] = result.theta_star.values;
  j["overlaps_with_lower"] = result.overlaps_with_lower;
  j["n_evaluations"] = result.opt.n_evaluations;
  j["constraint_violation"] = json_number(result.opt.constraint_violation);
  j["constraint_warning"] = result.constraint_warning;
  j["poor_refit"] = result.poor_refit;
  j["purified_weight"] = json_number(result.purified_weight);
  json trace = json::array();
  for (const auto& [x, f] : result.opt.history) trace.push_back(json_number(f));
  j["trace_f"] = trace;
  return j;
}

}  // namespace

int cmd_solve(const SolveSpec& spec, std::ostream& diagnostics) {
  FcidumpData data;
  try {
    data = parse_fcidump(spec.fcidump);
    data.integrals.validate();
  } catch (const std::exception& e) {
    diagnostics << "parse error: " << e.what() << "\n";
    return exit_code::parse_error;
  }

  try {
    const Oracle oracle = compute_oracle(data);
    std::vector<json> lines;

    if (spec.method == Method::CasciExact) {
      for (std::size_t k = 0; k < oracle.all.size(); ++k) {
        json j;
        j["method"] = "casci-exact";
        j["state"] = k;
        j["energy"] = oracle.all[k].energy;
        j["s_squared"] = oracle.all[k].s_squared;
        lines.push_back(j);
      }
    } else {
      const SectorSpec sector = data.sector();
      const int n_orb = data.integrals.n_orbitals();
      const QubitOperator h = map_parity_reduced(build_hamiltonian(data.integrals), sector, n_orb);
      const QubitOperator s2 = map_parity_reduced(build_s2_operator(n_orb), sector, n_orb);
      const Backend backend = spec.backend.make(h.n_qubits());

      const std::vector<StateRecord> records = run_states(h, s2, spec, backend);
      std::vector<std::pair<int, OptResult>> traces;
      for (const StateRecord& r : records) {
        lines.push_back(solve_record(spec, backend, r.state, r.result, oracle));
        traces.emplace_back(r.state, r.result.opt);
      }
      if (!spec.trace_out.empty()) write_trace(spec.trace_out, traces);
    }

    if (spec.out.empty()) {
      for (const json& j : lines) std::cout << j.dump() << "\n";
    } else {
      std::ofstream out = open_or_throw(spec.out);
      for (const json& j : lines) out << j.dump() << "\n";
    }
    return exit_code::success;
  } catch (const ParseError& e) {
    diagnostics << "parse error: " << e.what() << "\n";
    return exit_code::parse_error;
  } catch (const ExternalCommandError& e) {
    diagnostics << "external command error: " << e.what() << "\n";
    return exit_code::external_error;
  } catch (const std::exception& e) {
    diagnostics << "solver error: " << e.what() << "\n";
    return exit_code::solver_error;
  }
}

// ---------------------------------------------------------------------------
// landscape
// ---------------------------------------------------------------------------

namespace {

constexpr double kFdStep = 1e-3;  // finite-difference step for gradients/Hessians

struct LandscapeField {
  QubitOperator hamiltonian;

  double energy(double t0, double t1) const {
    return expectation(spin_restricted_state(t0, t1), hamiltonian);
  }
  std::pair<double, double> gradient(double t0, double t1) const {
    const double gx = (energy(t0 + kFdStep, t1) - energy(t0 - kFdStep, t1)) / (2 * kFdStep);
    const double gy = (energy(t0, t1 + kFdStep) - energy(t0, t1 - kFdStep)) / (2 * kFdStep);
    return {gx, gy};
  }
  double gradient_norm2(double t0, double t1) const {
    const auto [gx, gy] = gradient(t0, t1);
    return gx * gx + gy * gy;
  }
  // Hessian index: count of eigenvalues below -1e-5.
  int hessian_index(double t0, double t1) const {
    const double h = kFdStep;
    const double e0 = energy(t0, t1);
    const double fxx = (energy(t0 + h, t1) - 2 * e0 + energy(t0 - h, t1)) / (h * h);
    const double fyy = (energy(t0, t1 + h) - 2 * e0 + energy(t0, t1 - h)) / (h * h);
    const double fxy = (energy(t0 + h, t1 + h) - energy(t0 + h, t1 - h) -
                        energy(t0 - h, t1 + h) + energy(t0 - h, t1 - h)) /
                       (4 * h * h);
    const double mean = 0.5 * (fxx + fyy);
    const double disc = std::sqrt(0.25 * (fxx - fyy) * (fxx - fyy) + fxy * fxy);
    int index = 0;
    if (mean - disc < -1e-5) ++index;
    if (mean + disc < -1e-5) ++index;
    return index;
  }
};

double wrap_angle(double t) {
  while (t < -M_PI) t += 2 * M_PI;
  while (t >= M_PI) t -= 2 * M_PI;
  return t;
}

}  // namespace

int cmd_landscape(const LandscapeSpec& spec, std::ostream& diagnostics,
                  std::vector<StationaryPointReport>* reports) {
  if (spec.grid < 11) {
    diagnostics << "usage error: landscape grid needs at least 11 points per axis\n";
    return exit_code::usage;
  }

  FcidumpData data;
  try {
    data = parse_fcidump(spec.fcidump);
    data.integrals.validate();
  } catch (const std::exception& e) {
    diagnostics << "parse error: " << e.what() << "\n";
    return exit_code::parse_error;
  }

  try {
    const SectorSpec sector = data.sector();
    const LandscapeField field{
        map_parity_reduced(build_hamiltonian(data.integrals), sector,
                           data.integrals.n_orbitals())};

    const int g = spec.grid;
    const double spacing = 2 * M_PI / (g - 1);
    auto grid_angle = [&](int i) { return -M_PI + spacing * i; };

    Eigen::MatrixXd energies(g, g);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) energies(i, j) = field.energy(grid_angle(i), grid_angle(j));

    if (!spec.out_grid.empty()) {
      std::ofstream out = open_or_throw(spec.out_grid);
      out << "theta0,theta1,energy\n";
      for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
          out << fmt(grid_angle(i)) << "," << fmt(grid_angle(j)) << "," << fmt(energies(i, j))
              << "\n";
    }

    // Candidate stationary points: local minima of |grad|^2 over the
    // periodic grid (the duplicated +pi row/column is skipped).
    const int period = g - 1;
    Eigen::MatrixXd gnorm(period, period);
    for (int i = 0; i < period; ++i)
      for (int j = 0; j < period; ++j)
        gnorm(i, j) = field.gradient_norm2(grid_angle(i), grid_angle(j));

    std::vector<std::pair<double, double>> candidates;
    for (int i = 0; i < period; ++i)
      for (int j = 0; j < period; ++j) {
        bool is_min = true;
        for (int di = -1; di <= 1 && is_min; ++di)
          for (int dj = -1; dj <= 1 && is_min; ++dj) {
            if (di == 0 && dj == 0) continue;
            const int ni = (i + di + period) % period;
            const int nj = (j + dj + period) % period;
            if (gnorm(ni, nj) < gnorm(i, j)) is_min = false;
          }
        if (is_min) candidates.emplace_back(grid_angle(i), grid_angle(j));
      }

    // Refine by derivative-free descent on |grad|^2, then classify.
    OptimizerConfig polish;
    polish.rho_begin = spacing;
    polish.rho_end = 1e-9;
    polish.max_evaluations = 400;
    polish.f_tolerance = 0.0;
    const ObjectiveFn gnorm_obj = [&](std::span<const double> t) {
      return field.gradient_norm2(t[0], t[1]);
    };

    std::vector<StationaryPointReport> found;
    for (const auto& [c0, c1] : candidates) {
      const OptResult polished = minimize(gnorm_obj, {}, {c0, c1}, polish);
      const double t0 = wrap_angle(polished.x_best[0]);
      const double t1 = wrap_angle(polished.x_best[1]);
      if (field.gradient_norm2(t0, t1) > 1e-10) continue;  // refinement did not land
      StationaryPointReport report;
      report.theta0 = t0;
      report.theta1 = t1;
      report.energy = field.energy(t0, t1);
      report.index = field.hessian_index(t0, t1);
      bool duplicate = false;
      for (const StationaryPointReport& other : found)
        if (other.index == report.index && std::abs(other.energy - report.energy) < 1e-5)
          duplicate = true;
      if (!duplicate) found.push_back(report);
    }
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.energy < b.energy; });

    // Orthogonality locus against the located minimum.
    const StationaryPointReport* minimum = nullptr;
    for (const StationaryPointReport& r : found)
      if (r.index == 0 && (!minimum || r.energy < minimum->energy)) minimum = &r;

    if (minimum) {
      const Statevector ground = spin_restricted_state(minimum->theta0, minimum->theta1);
      for (StationaryPointReport& r : found) {
        const double ov = overlap_probability(spin_restricted_state(r.theta0, r.theta1), ground);
        r.on_orthogonality_locus = ov < 1e-3;
      }
      if (!spec.out_locus.empty()) {
        std::ofstream out = open_or_throw(spec.out_locus);
        out << "theta0,theta1,overlap\n";
        for (int i = 0; i < g; ++i)
          for (int j = 0; j < g; ++j) {
            const double ov = overlap_probability(
                spin_restricted_state(grid_angle(i), grid_angle(j)), ground);
            if (ov < 1e-3)
              out << fmt(grid_angle(i)) << "," << fmt(grid_angle(j)) << "," << fmt(ov) << "\n";
          }
      }
    }

    if (!spec.out_stationary.empty()) {
      std::ofstream out = open_or_throw(spec.out_stationary);
      out << "theta0,theta1,energy,index,on_orthogonality_locus\n";
      for (const StationaryPointReport& r : found)
        out << fmt(r.theta0) << "," << fmt(r.theta1) << "," << fmt(r.energy) << "," << r.index
            << "," << (r.on_orthogonality_locus ? 1 : 0) << "\n";
    }

    if (reports) *reports = found;
    return exit_code::success;
  } catch (const std::exception& e) {
    diagnostics << "solver error: " << e.what() << "\n";
    return exit_code::solver_error;
  }
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

int cmd_sweep(const SweepSpec& spec, std::ostream& diagnostics) {
  const bool beta_sweep = !spec.betas.empty();
  const bool noise_sweep = !spec.noise_scales.empty();
  if (beta_sweep == noise_sweep) {
    diagnostics << "usage error: provide exactly one of a beta list or a noise-scale list\n";
    return exit_code::usage;
  }

  FcidumpData data;
  try {
    data = parse_fcidump(spec.fcidump);
    data.integrals.validate();
  } catch (const std::exception& e) {
    diagnostics << "parse error: " << e.what() << "\n";
    return exit_code::parse_error;
  }

  try {
    const Oracle oracle = compute_oracle(data);
    const SectorSpec sector = data.sector();
    const int n_orb = data.integrals.n_orbitals();
    const QubitOperator h = map_parity_reduced(build_hamiltonian(data.integrals), sector, n_orb);
    const QubitOperator s2 = map_parity_reduced(build_s2_operator(n_orb), sector, n_orb);

    std::ostringstream csv;
    csv << "sweep,value,state,method,ansatz,energy,exact_energy,delta_e_hartree,delta_e_kcal,"
           "s_squared,n_evaluations,constraint_violation\n";

    auto emit = [&](const std::string& kind, double value, int state, const std::string& method,
                    const SolveResult& r) {
      const double exact = oracle.singlet_energy(state);
      csv << kind << "," << fmt(value) << "," << state << "," << method << ","
          << spec.ansatz.name() << "," << fmt(r.energy) << "," << fmt(exact) << ","
          << fmt(r.energy - exact) << "," << fmt((r.energy - exact) * kKcalPerHartree) << ","
          << fmt(r.s_squared) << "," << r.opt.n_evaluations << ","
          << fmt(r.opt.constraint_violation) << "\n";
    };

    if (beta_sweep) {
      const Backend backend = spec.backend.make(h.n_qubits());
      for (double beta : spec.betas) {
        const SolveResult ground = vqe(h, spec.ansatz, backend, spec.opt, &s2);
        emit("beta", beta, 0, "vqe", ground);
        std::vector<AnsatzParameters> lower{ground.theta_star};
        for (int state = 1; state < spec.states; ++state) {
          const VQDConfig vqd_cfg{beta, spec.gamma};
          const SolveResult excited =
              vqd(h, spec.ansatz, backend, spec.opt, lower, vqd_cfg, s2);
          emit("beta", beta, state, "vqd", excited);
          lower.push_back(excited.theta_star);
        }
      }
    } else {
      for (double scale : spec.noise_scales) {
        BackendSpec scaled = spec.backend;
        Backend backend = scaled.make(h.n_qubits());
        if (backend.is_statevector())
          throw std::invalid_argument("noise sweep requires a noise config");
        backend.noise.p1 = std::min(1.0, backend.noise.p1 * scale);
        backend.noise.p2 = std::min(1.0, backend.noise.p2 * scale);

        std::vector<AnsatzParameters> lower;
        for (int state = 0; state < spec.states; ++state) {
          SolveResult r;
          std::string method = method_name(spec.method);
          if (state == 0) {
            r = vqe(h, spec.ansatz, backend, spec.opt, &s2);
            method = "vqe";
          } else if (spec.method == Method::Vqd) {
            r = vqd(h, spec.ansatz, backend, spec.opt, lower, VQDConfig{spec.betas.empty() ? 5.0 : spec.betas[0], spec.gamma}, s2);
          } else {
            r = vqe_ac(h, spec.ansatz, backend, spec.opt, lower, spec.epsilon, &s2);
          }
          emit("noise", scale, state, method, r);
          lower.push_back(r.theta_star);
        }
      }
    }

    if (spec.out.empty()) {
      std::cout << csv.str();
    } else {
      std::ofstream out = open_or_throw(spec.out);
      out << csv.str();
    }
    return exit_code::success;
  } catch (const std::exception& e) {
    diagnostics << "solver error: " << e.what() << "\n";
    return exit_code::solver_error;
  }
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

int cmd_calibrate(const CalibrateSpec& spec, std::ostream& diagnostics) {
  try {
    NoiseModel nm = spec.noise_config.empty()
                        ? NoiseModel::default_synthetic(spec.n_qubits, resolve_seed(spec.seed))
                        : NoiseModel::from_file(spec.noise_config);
    if (spec.seed) nm.seed = *spec.seed;
    const Eigen::MatrixXd calibration = readout_calibrate(nm, spec.n_qubits);

    std::ostringstream csv;
    for (long i = 0; i < calibration.rows(); ++i) {
      for (long j = 0; j < calibration.cols(); ++j) {
        if (j) csv << ",";
        csv << fmt(calibration(i, j));
      }
      csv << "\n";
    }
    if (spec.out.empty()) {
      std::cout << csv.str();
    } else {
      std::ofstream out = open_or_throw(spec.out);
      out << csv.str();
    }
    return exit_code::success;
  } catch (const ParseError& e) {
    diagnostics << "parse error: " << e.what() << "\n";
    return exit_code::parse_error;
  } catch (const std::exception& e) {
    diagnostics << "solver error: " << e.what() << "\n";
    return exit_code::solver_error;
  }
}

// ---------------------------------------------------------------------------
// sa-driver
// ---------------------------------------------------------------------------

int cmd_sa_driver(const SaDriverSpec& spec, std::ostream& diagnostics) {
  try {
    SolverSettings settings = spec.solver;
    settings.backend = spec.backend.make(2);

    const std::vector<MacroIterationRecord> records =
        run_sa_casscf(spec.fcidump, spec.states, spec.casscf, settings, spec.workdir);

    std::ostringstream body;
    for (const MacroIterationRecord& r : records) {
      json j;
      j["iteration"] = r.iteration;
      j["state_energies"] = r.state_energies;
      j["averaged_energy"] = json_number(r.averaged_energy);
      j["energy_change"] = json_number(r.energy_change);
      j["converged"] = r.converged;
      body << j.dump() << "\n";
    }
    if (spec.out.empty()) {
      std::cout << body.str();
    } else {
      std::ofstream out = open_or_throw(spec.out);
      out << body.str();
    }
    const bool converged = !records.empty() && records.back().converged;
    const bool single = spec.casscf.external_command.empty();
    if (!converged && !single)
      diagnostics << "warning: macro-iteration budget reached without convergence\n";
    return exit_code::success;
  } catch (const ParseError& e) {
    diagnostics << "parse error: " << e.what() << "\n";
    return exit_code::parse_error;
  } catch (const ExternalCommandError& e) {
    diagnostics << "external command error: " << e.what() << "\n";
    return exit_code::external_error;
  } catch (const std::exception& e) {
    diagnostics << "solver error: " << e.what() << "\n";
    return exit_code::solver_error;
  }
}

}  // namespace vqcas
