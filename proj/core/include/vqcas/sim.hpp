#pragma once

// Exact statevector and density-matrix simulation, shot sampling under a
// parameterized depolarizing + readout noise model, measurement-error
// mitigation, two-qubit state tomography, and purification.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vqcas/ansatz.hpp"
#include "vqcas/circuit.hpp"
#include "vqcas/errors.hpp"
#include "vqcas/opt.hpp"
#include "vqcas/qop.hpp"

namespace vqcas {

// ---------------------------------------------------------------------------
// Noise model
// ---------------------------------------------------------------------------

/// Depolarizing probabilities per gate arity, per-qubit readout confusion
/// matrices (column-stochastic, columns = prepared 0/1), shot count and
/// the one RNG seed all sampling flows from.
struct NoiseModel {
  double p1 = 0.0;
  double p2 = 0.0;
  std::vector<Eigen::Matrix2d> readout;  // empty = ideal readout
  int shots = 8192;
  std::uint64_t seed = 0;

  /// Confusion matrix for qubit q (identity when unset).
  Eigen::Matrix2d readout_for(int q) const;
  bool ideal_readout() const;

  void validate() const;

  /// Defaults mirroring the synthetic device surrogate: p1=1e-3, p2=1e-2,
  /// 2.5% symmetric readout flips on every qubit.
  static NoiseModel default_synthetic(int n_qubits, std::uint64_t seed);
  static NoiseModel noiseless();

  /// Reads keys p1, p2, readout, shots, seed from a JSON file.
  static NoiseModel from_file(const std::filesystem::path& path);
};

// ---------------------------------------------------------------------------
// Exact simulation
// ---------------------------------------------------------------------------

Statevector run_statevector(const Circuit& c);

/// Mixed state on a small register.
struct DensityMatrix {
  Eigen::MatrixXcd entries;

  int n_qubits() const;
  double purity() const;
  /// Hermitian within 1e-10, unit trace within 1e-8, eigenvalues >= -1e-6.
  void validate() const;

  static DensityMatrix pure(const Statevector& psi);
  static DensityMatrix maximally_mixed(int n_qubits);
};

/// Applies each gate as a unitary channel followed by depolarizing noise
/// on the touched qubits (p1 for single-qubit gates, p2 on both Cnot
/// qubits): rho -> (1-p) rho + p Tr_q(rho) x I/2 per touched qubit.
DensityMatrix run_density(const Circuit& c, const NoiseModel& nm);

double expectation(const Statevector& state, const QubitOperator& op);
double expectation(const DensityMatrix& state, const QubitOperator& op);

// ---------------------------------------------------------------------------
// Sampling and estimation
// ---------------------------------------------------------------------------

/// Shot histogram keyed by measured bitstring (q_{n-1}...q_0).
struct Counts {
  std::map<std::string, long> table;
  long total = 0;
  int n_qubits = 0;

  long at(const std::string& bits) const;
  /// Probabilities ordered by basis index.
  std::vector<double> frequencies() const;
};

/// Samples the diagonal of run_density(c + basis_changes, nm), then sends
/// every shot through the per-qubit readout confusion channel.
/// Deterministic for a fixed seed.
Counts sample_counts(const Circuit& c, const Circuit& basis_changes, const NoiseModel& nm);

struct EstimateResult {
  double value = 0.0;
  double std_error = 0.0;
};

/// Estimates <op> by grouping Pauli terms into joint measurement bases
/// (H for X, SDagger+H for Y), sampling each basis once, and aggregating
/// term expectations; std_error from binomial propagation. When
/// `mitigated`, counts pass through readout mitigation first, using
/// `calibration` if provided or a freshly assembled matrix otherwise.
EstimateResult estimate_expectation(const Circuit& c, const QubitOperator& op,
                                    const NoiseModel& nm, bool mitigated,
                                    const Eigen::MatrixXd* calibration = nullptr);

/// Runs the 2^n computational-basis preparation circuits through
/// sample_counts and assembles the empirical confusion matrix
/// (columns = prepared states; each column sums to exactly 1).
Eigen::MatrixXd readout_calibrate(const NoiseModel& nm, int n_qubits);

/// Solves A p = raw/shots for p >= 0, sum(p) = 1 by nonnegative least
/// squares. Throws MitigationError when cond(A) > 1e6.
std::vector<double> mitigate_counts(const Counts& raw, const Eigen::MatrixXd& calibration);

// ---------------------------------------------------------------------------
// Tomography and purification
// ---------------------------------------------------------------------------

/// Linear-inversion two-qubit state tomography from mitigated Pauli
/// expectations, projected to the nearest trace-1 PSD matrix by
/// eigenvalue clipping.
DensityMatrix tomography(const Circuit& c, const NoiseModel& nm);

struct Purified {
  Statevector psi;
  double weight = 0.0;
  bool degenerate = false;  // top eigenvalue within 1e-9 of the next
};

/// Dominant eigenvector with its eigenvalue; phase fixed so the
/// largest-magnitude amplitude is real positive.
Purified purify(const DensityMatrix& rho);

struct RefitResult {
  AnsatzParameters params;
  double fidelity = 0.0;
  bool poor_fit = false;  // fidelity < 0.5: target outside the ansatz manifold
};

/// Re-expresses `target` in ansatz parameters by maximizing
/// |<target|Psi(theta)>|^2 from `start`.
RefitResult refit_parameters(const AnsatzKind& kind, const Statevector& target,
                             const AnsatzParameters& start);

}  // namespace vqcas
