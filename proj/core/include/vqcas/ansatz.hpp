#pragma once

// Parameterized circuit families: the singlet-restricted two-qubit ansatz
// plus the RealAmplitudes and EfficientSU2 heuristic baselines.

#include <string>
#include <vector>

#include "vqcas/circuit.hpp"

namespace vqcas {

enum class AnsatzFamily { SpinRestricted, RealAmplitudes, EfficientSU2 };

struct AnsatzKind {
  AnsatzFamily family = AnsatzFamily::SpinRestricted;
  int depth = 0;  // heuristic families only
  int n_qubits = 2;

  static AnsatzKind spin_restricted();
  static AnsatzKind real_amplitudes(int depth);
  static AnsatzKind efficient_su2(int depth);

  /// Parses "spin-restricted", "ra(d)" / "real-amplitudes(d)",
  /// "efficient-su2(d)".
  static AnsatzKind parse(const std::string& name);
  std::string name() const;

  friend bool operator==(const AnsatzKind&, const AnsatzKind&) = default;
};

struct AnsatzParameters {
  std::vector<double> values;  // radians
};

/// SpinRestricted -> 2; RealAmplitudes(d) -> 2(d+1); EfficientSU2(d) -> 4(d+1).
int parameter_count(const AnsatzKind& kind);

/// Paper protocol starting point: (0, pi) for spin-restricted (the HF
/// state), all zeros for the heuristic families.
AnsatzParameters initial_parameters(const AnsatzKind& kind);

/// Gate realization of the family at the given parameters.
Circuit build(const AnsatzKind& kind, const AnsatzParameters& theta);

/// Closed-form singlet-restricted state over {|00>,|01>,|10>,|11>}; the
/// |00> and |11> amplitudes are equal by construction.
Statevector spin_restricted_state(double theta0, double theta1);

}  // namespace vqcas
