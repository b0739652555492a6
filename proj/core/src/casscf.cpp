#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "vqcas/chem.hpp"

namespace vqcas {

void CasscfConfig::validate() const {
  if (weights.empty()) throw std::invalid_argument("casscf: no averaging weights");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0) throw std::invalid_argument("casscf: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw std::invalid_argument("casscf: weights must sum to 1");
  if (energy_threshold <= 0 || max_macro_iterations < 1)
    throw std::invalid_argument("casscf: thresholds must be positive");
}

namespace {

std::string substitute(std::string text, const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
  return text;
}

std::string tail_of(const std::filesystem::path& log, std::size_t max_chars = 2000) {
  std::ifstream in(log);
  if (!in) return "";
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  if (text.size() > max_chars) text = "..." + text.substr(text.size() - max_chars);
  return text;
}

// One CI-side pass: solve the requested states on the current integrals
// and measure each state's RDMs.
struct CiPass {
  std::vector<double> energies;
  std::vector<RDMPair> rdms;
};

CiPass solve_states(const FcidumpData& data, int states, const SolverSettings& settings) {
  data.integrals.validate();
  const SectorSpec sector = data.sector();
  const QubitOperator h =
      map_parity_reduced(build_hamiltonian(data.integrals), sector, data.integrals.n_orbitals());
  const QubitOperator s2 =
      map_parity_reduced(build_s2_operator(data.integrals.n_orbitals()), sector,
                         data.integrals.n_orbitals());

  CiPass pass;
  std::vector<AnsatzParameters> lower;
  for (int state = 0; state < states; ++state) {
    SolveResult result;
    if (state == 0) {
      result = vqe(h, settings.kind, settings.backend, settings.opt, &s2);
    } else if (settings.excited == SolverSettings::ExcitedMethod::VQEAC) {
      result = vqe_ac(h, settings.kind, settings.backend, settings.opt, lower, settings.epsilon,
                      &s2);
    } else {
      result = vqd(h, settings.kind, settings.backend, settings.opt, lower, settings.vqd, s2);
    }
    pass.energies.push_back(result.energy);
    pass.rdms.push_back(measure_rdms(result.theta_star, settings.kind, settings.backend, sector));
    lower.push_back(result.theta_star);
  }
  return pass;
}

}  // namespace

std::vector<MacroIterationRecord> run_sa_casscf(const std::filesystem::path& initial_fcidump,
                                                int states, const CasscfConfig& cfg,
                                                const SolverSettings& settings,
                                                const std::filesystem::path& workdir) {
  cfg.validate();
  if (states < 1) throw std::invalid_argument("casscf: need at least one state");
  if (static_cast<int>(cfg.weights.size()) != states)
    throw std::invalid_argument("casscf: one weight per state required");

  std::filesystem::path dir = workdir;
  if (dir.empty()) {
    dir = std::filesystem::temp_directory_path() /
          ("vqcas_casscf_" + std::to_string(std::random_device{}()));
  }
  std::filesystem::create_directories(dir);

  FcidumpData current = parse_fcidump(initial_fcidump);
  const bool single_iteration = cfg.external_command.empty();

  std::vector<MacroIterationRecord> records;
  double previous_energy = std::numeric_limits<double>::quiet_NaN();

  for (int iter = 0; iter < cfg.max_macro_iterations; ++iter) {
    const CiPass pass = solve_states(current, states, settings);

    MacroIterationRecord record;
    record.iteration = iter;
    record.state_energies = pass.energies;
    for (int s = 0; s < states; ++s)
      record.averaged_energy += cfg.weights[static_cast<std::size_t>(s)] * pass.energies[static_cast<std::size_t>(s)];
    record.energy_change = record.averaged_energy - previous_energy;  // NaN on iteration 0
    record.converged =
        iter > 0 && std::abs(record.energy_change) < cfg.energy_threshold;
    records.push_back(record);

    if (record.converged || single_iteration) break;
    previous_energy = record.averaged_energy;

    // Hand the averaged RDMs and current integrals to the orbital
    // updater; it must produce the next FCIDUMP.
    const RDMPair averaged = state_average_rdms(pass.rdms, cfg.weights);
    const std::filesystem::path rdm_path = dir / ("rdm_" + std::to_string(iter) + ".txt");
    const std::filesystem::path fcid_path = dir / ("fcidump_" + std::to_string(iter) + ".txt");
    const std::filesystem::path next_path = dir / ("fcidump_" + std::to_string(iter + 1) + ".txt");
    const std::filesystem::path log_path = dir / ("orbital_update_" + std::to_string(iter) + ".log");
    write_rdms(averaged, rdm_path);
    write_fcidump(current, fcid_path);

    std::string command = cfg.external_command;
    const bool has_out = command.find("{out}") != std::string::npos;
    command = substitute(command, "{fcidump}", fcid_path.string());
    command = substitute(command, "{rdm}", rdm_path.string());
    command = substitute(command, "{out}", next_path.string());
    command += " > " + log_path.string() + " 2>&1";

    const int status = std::system(command.c_str());
    if (status != 0)
      throw ExternalCommandError("orbital update failed (exit " + std::to_string(status) +
                                 "): " + tail_of(log_path));
    const std::filesystem::path updated = has_out ? next_path : fcid_path;
    if (!std::filesystem::exists(updated))
      throw ExternalCommandError("orbital update produced no FCIDUMP at " + updated.string());
    current = parse_fcidump(updated);
  }
  return records;
}

}  // namespace vqcas
