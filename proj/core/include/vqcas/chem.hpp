#pragma once

// FCIDUMP ingestion, RDM export, and the state-averaged CASSCF macro
// loop that delegates orbital rotation to an external command behind a
// file interface.

#include <filesystem>
#include <string>
#include <vector>

#include "vqcas/solve.hpp"

namespace vqcas {

/// Parsed FCIDUMP contents: integrals plus the header's electron count
/// and doubled spin projection.
struct FcidumpData {
  ActiveSpaceIntegrals integrals;
  int n_electrons = 0;
  int ms2 = 0;

  SectorSpec sector() const { return SectorSpec{n_electrons, ms2}; }
};

/// Molpro-style plain-text FCIDUMP without point-group symmetry:
/// header with NORB/NELEC/MS2, then "value p q r s" lines (1-based,
/// chemists' notation); (0,0,0,0) is the core energy, (p,q,0,0) are h1
/// entries. Unlisted symmetry images are completed automatically.
FcidumpData parse_fcidump(const std::filesystem::path& path);

void write_fcidump(const FcidumpData& data, const std::filesystem::path& path);

/// Self-describing text export: dimensions, weights, then nonzero 1-RDM
/// and 2-RDM entries at 15 significant digits. Entries below 1e-14 are
/// omitted and read back as zero.
void write_rdms(const RDMPair& rdms, const std::filesystem::path& path);
RDMPair read_rdms(const std::filesystem::path& path);

struct CasscfConfig {
  std::vector<double> weights;          // per-state averaging weights
  double energy_threshold = 1e-4;       // Hartree, on the averaged energy change
  int max_macro_iterations = 100;
  /// Orbital-update command template with {fcidump}, {rdm} and {out}
  /// placeholders. The command must exit 0 and leave an updated FCIDUMP
  /// at the {out} path (at the {fcidump} path when {out} is unused).
  /// Empty = single-iteration (CASCI) mode.
  std::string external_command;

  void validate() const;
};

struct MacroIterationRecord {
  int iteration = 0;
  std::vector<double> state_energies;
  double averaged_energy = 0.0;
  double energy_change = 0.0;  // vs the previous iteration; NaN on the first
  bool converged = false;
};

/// How the per-iteration states are solved.
struct SolverSettings {
  AnsatzKind kind = AnsatzKind::spin_restricted();
  Backend backend = Backend::statevector();
  OptimizerConfig opt;
  enum class ExcitedMethod { VQEAC, VQD } excited = ExcitedMethod::VQEAC;
  VQDConfig vqd;
  double epsilon = 1e-4;
};

/// Macro loop: parse integrals, map H and S^2, solve the requested
/// states, measure and average RDMs, export them, call the external
/// command for new orbitals, repeat until the averaged energy moves by
/// less than the threshold. Non-converged budget exhaustion is flagged
/// on the last record.
std::vector<MacroIterationRecord> run_sa_casscf(const std::filesystem::path& initial_fcidump,
                                                int states, const CasscfConfig& cfg,
                                                const SolverSettings& settings,
                                                const std::filesystem::path& workdir = {});

}  // namespace vqcas
