#include <bit>
#include <cmath>

#include "vqcas/qop.hpp"

namespace vqcas {

namespace {

int mask_n_electrons(unsigned mask) { return std::popcount(mask); }

int mask_twice_sz(unsigned mask, int n_orbitals) {
  const unsigned alpha = mask & ((1u << n_orbitals) - 1);
  const unsigned beta = mask >> n_orbitals;
  return std::popcount(alpha) - std::popcount(beta);
}

}  // namespace

std::array<unsigned, 4> cas22_dictionary_masks() {
  // Spin-orbital bits: 0 = H-up, 1 = L-up, 2 = H-down, 3 = L-down. Each
  // determinant is created in ascending index order, so all signs are +1.
  return {
      0b1001u,  // |00> : H-up L-down
      0b0101u,  // |01> : H-up H-down
      0b1010u,  // |10> : L-up L-down
      0b0110u,  // |11> : L-up H-down
  };
}

QubitOperator map_parity_reduced(const FermionOperator& op, const SectorSpec& sector,
                                 int n_orbitals) {
  if (n_orbitals != 2 || sector != SectorSpec{2, 0})
    throw UnsupportedSizeError(
        "map_parity_reduced: only the 2-orbital, N=2, Sz=0 sector is supported");
  const int n_so = 2 * n_orbitals;
  if (op.max_index() >= n_so)
    throw std::invalid_argument("map_parity_reduced: operator index outside the active space");

  const long fock_dim = 1L << n_so;

  // The operator must conserve N and Sz over the whole Fock space, not
  // just on the target sector.
  std::vector<Eigen::VectorXd> columns(static_cast<std::size_t>(fock_dim));
  for (long j = 0; j < fock_dim; ++j) {
    Eigen::VectorXd basis = Eigen::VectorXd::Zero(fock_dim);
    basis[j] = 1.0;
    columns[static_cast<std::size_t>(j)] = apply_to_fock(op, basis, n_so);
    const unsigned src = static_cast<unsigned>(j);
    for (long i = 0; i < fock_dim; ++i) {
      if (std::abs(columns[static_cast<std::size_t>(j)][i]) < kCoefficientCutoff) continue;
      const unsigned dst = static_cast<unsigned>(i);
      if (mask_n_electrons(dst) != mask_n_electrons(src) ||
          mask_twice_sz(dst, n_orbitals) != mask_twice_sz(src, n_orbitals))
        throw std::invalid_argument("map_parity_reduced: operator is not sector-conserving");
    }
  }

  // Sector block in the dictionary order.
  const std::array<unsigned, 4> dict = cas22_dictionary_masks();
  Eigen::Matrix4d block;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) block(i, j) = columns[dict[static_cast<std::size_t>(j)]][dict[static_cast<std::size_t>(i)]];

  // Expand the 4x4 block in the two-qubit Pauli basis:
  // coeff(P) = Tr(P * block) / 4.
  static const char letters[4] = {'I', 'X', 'Y', 'Z'};
  QubitOperator mapped(2);
  for (int l1 = 0; l1 < 4; ++l1) {
    for (int l0 = 0; l0 < 4; ++l0) {
      std::string word = {letters[l0], letters[l1]};  // word[q] = letter on qubit q
      QubitOperator single(2);
      single.add_term(1.0, word);
      const Eigen::MatrixXcd pauli = matrix_of(single);
      const complexd coeff = (pauli * block.cast<complexd>()).trace() / 4.0;
      if (std::abs(coeff) >= kCoefficientCutoff) mapped.add_term(coeff, word);
    }
  }
  return mapped;
}

}  // namespace vqcas
