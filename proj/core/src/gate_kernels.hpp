#pragma once

// Internal gate-application kernels shared by the statevector and
// density-matrix simulators.

#include <Eigen/Dense>

#include "vqcas/circuit.hpp"

namespace vqcas {

Eigen::Matrix2cd single_qubit_unitary(const Gate& g);
void apply_gate(Eigen::VectorXcd& amps, const Gate& g);

}  // namespace vqcas
