#pragma once

// Batch experiment runner behind the CLI: single-point solves, the
// two-parameter landscape scanner, beta / noise sweeps, readout
// calibration export, and the SA-CASSCF driver. Commands write
// machine-readable records (JSON lines, CSV) and return process exit
// codes; no interactive output.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vqcas/chem.hpp"
#include "vqcas/solve.hpp"

namespace vqcas {

/// Reporting unit used throughout the result records.
inline constexpr double kKcalPerHartree = 627.5095;

namespace exit_code {
inline constexpr int success = 0;
inline constexpr int usage = 1;
inline constexpr int parse_error = 2;
inline constexpr int solver_error = 3;
inline constexpr int external_error = 4;
}  // namespace exit_code

enum class Method { Vqe, Vqd, VqeAc, CasciExact };

Method parse_method(const std::string& name);
std::string method_name(Method method);

/// Backend selection shared by the solve-like commands. An empty noise
/// config path means the exact statevector backend.
struct BackendSpec {
  std::filesystem::path noise_config;
  bool mitigated = true;
  bool purified = true;
  std::optional<int> shots;
  std::optional<std::uint64_t> seed;

  Backend make(int n_qubits) const;
};

struct SolveSpec {
  std::filesystem::path fcidump;
  AnsatzKind ansatz = AnsatzKind::spin_restricted();
  Method method = Method::Vqe;
  int states = 1;
  double beta = 5.0;
  double gamma = 0.0;
  double epsilon = 1e-4;
  BackendSpec backend;
  OptimizerConfig opt;
  std::vector<double> initial_theta;  // empty = the family's protocol start
  std::filesystem::path out;          // JSON lines; empty = stdout
  std::filesystem::path trace_out;    // optional per-evaluation CSV
};

/// Solves the requested states and writes one JSON record per state with
/// the energy, the oracle gap in Hartree and kcal/mol, <S^2>, theta*,
/// overlaps and convergence flags. Delta-E values are recomputed against
/// exact_casci in-process.
int cmd_solve(const SolveSpec& spec, std::ostream& diagnostics);

struct StationaryPointReport {
  double theta0 = 0.0;
  double theta1 = 0.0;
  double energy = 0.0;
  int index = 0;  // negative Hessian eigenvalues (central differences, step 1e-3)
  bool on_orthogonality_locus = false;
};

struct LandscapeSpec {
  std::filesystem::path fcidump;
  int grid = 201;  // points per axis over [-pi, pi]
  std::filesystem::path out_grid;
  std::filesystem::path out_stationary;
  std::filesystem::path out_locus;
};

/// Scans the spin-restricted energy landscape, refines and classifies
/// its stationary points, and emits the S0-orthogonality locus.
int cmd_landscape(const LandscapeSpec& spec, std::ostream& diagnostics,
                  std::vector<StationaryPointReport>* reports = nullptr);

struct SweepSpec {
  std::filesystem::path fcidump;
  AnsatzKind ansatz = AnsatzKind::spin_restricted();
  std::vector<double> betas;         // VQD beta sweep
  std::vector<double> noise_scales;  // scales p1/p2 of the noise model
  Method method = Method::VqeAc;     // noise sweeps only
  int states = 2;
  double gamma = 0.0;
  double epsilon = 1e-4;
  BackendSpec backend;
  OptimizerConfig opt;
  std::filesystem::path out;  // aggregate CSV
};

/// Runs the solve across a beta list or a noise-level list with a shared
/// seed policy; same seed, byte-identical CSV.
int cmd_sweep(const SweepSpec& spec, std::ostream& diagnostics);

struct CalibrateSpec {
  std::filesystem::path noise_config;  // empty = default synthetic model
  int n_qubits = 2;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;  // CSV matrix
};

int cmd_calibrate(const CalibrateSpec& spec, std::ostream& diagnostics);

struct SaDriverSpec {
  std::filesystem::path fcidump;
  int states = 2;
  CasscfConfig casscf;
  SolverSettings solver;
  BackendSpec backend;
  std::filesystem::path workdir;
  std::filesystem::path out;  // one JSON line per macro-iteration
};

int cmd_sa_driver(const SaDriverSpec& spec, std::ostream& diagnostics);

/// Seed resolution: explicit value, else the VQCAS_SEED environment
/// variable, else 0.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& explicit_seed);

}  // namespace vqcas
