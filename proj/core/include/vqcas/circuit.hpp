#pragma once

// Gate-list circuits and pure states for small registers.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vqcas {

enum class GateKind { PauliX, Ry, Rz, Hadamard, SDagger, Cnot };

struct Gate {
  GateKind kind;
  int target;        // acted-on qubit; Cnot target
  int control = -1;  // Cnot only
  double angle = 0;  // Ry / Rz only
};

/// Ordered gate list on a fixed register. Qubit 0 is the least
/// significant bit of a basis index; bitstrings print as q_{n-1}...q_0.
struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;

  explicit Circuit(int n = 0) : n_qubits(n) {}

  Circuit& x(int q);
  Circuit& ry(int q, double angle);
  Circuit& rz(int q, double angle);
  Circuit& h(int q);
  Circuit& sdg(int q);
  Circuit& cnot(int control, int target);

  void append(const Circuit& other);

  /// Gate-by-gate inverse. SDagger inverts to Rz(pi/2), equal up to a
  /// global phase.
  Circuit inverse() const;

  bool single_qubit_only() const;

  /// Throws std::invalid_argument on out-of-range indices or
  /// control == target.
  void validate() const;
};

/// Normalized pure state; amplitude index bit q = state of qubit q.
struct Statevector {
  Eigen::VectorXcd amplitudes;

  int n_qubits() const;
  /// Throws if the 2-norm deviates from 1 beyond 1e-10.
  void validate() const;

  static Statevector zero_state(int n_qubits);
  static Statevector from_amplitudes(Eigen::VectorXcd amps);
};

/// |<a|b>|^2.
double overlap_probability(const Statevector& a, const Statevector& b);

/// True when the states agree up to a global phase within tol.
bool equal_up_to_phase(const Statevector& a, const Statevector& b, double tol = 1e-10);

std::string bitstring_of(long index, int n_qubits);
long index_of_bitstring(const std::string& bits);

}  // namespace vqcas
