#pragma once

// Fermionic and Pauli operator algebra: second-quantized active-space
// Hamiltonians, the spin-squared operator, and the parity mapping with
// two-qubit reduction for the CAS(2,2) Sz=0 sector.

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vqcas/errors.hpp"

namespace vqcas {

using complexd = std::complex<double>;

/// Coefficients below this magnitude are dropped during simplification.
inline constexpr double kCoefficientCutoff = 1e-12;

// ---------------------------------------------------------------------------
// Pauli operators
// ---------------------------------------------------------------------------

/// One weighted Pauli string. word[q] is the letter acting on qubit q,
/// so "XY" puts X on qubit 0 and Y on qubit 1.
struct PauliTerm {
  complexd coefficient;
  std::string word;
};

/// Weighted sum of Pauli strings on a fixed register. Terms are kept
/// simplified: unique words, coefficients above the pruning cutoff.
class QubitOperator {
 public:
  QubitOperator() = default;
  explicit QubitOperator(int n_qubits);

  static QubitOperator identity(int n_qubits, complexd coefficient = 1.0);

  int n_qubits() const { return n_qubits_; }

  /// Adds coefficient * word, merging with an existing equal word.
  void add_term(complexd coefficient, std::string_view word);

  QubitOperator& operator+=(const QubitOperator& other);
  QubitOperator& operator*=(complexd scale);
  friend QubitOperator operator+(QubitOperator a, const QubitOperator& b) { return a += b; }
  friend QubitOperator operator*(complexd s, QubitOperator a) { return a *= s; }

  /// Terms in deterministic (lexicographic word) order.
  std::vector<PauliTerm> terms() const;

  std::size_t n_terms() const { return terms_.size(); }

  /// Coefficient of a word (0 if absent).
  complexd coefficient(std::string_view word) const;

  /// True when every coefficient is real within tol (Pauli words are
  /// Hermitian, so this is the whole Hermiticity condition).
  bool is_hermitian(double tol = kCoefficientCutoff) const;

  std::string to_string() const;

 private:
  void validate_word(std::string_view word) const;

  int n_qubits_ = 0;
  std::map<std::string, complexd> terms_;
};

/// Dense 2^n x 2^n matrix of the operator. Guarded at n_qubits <= 12.
Eigen::MatrixXcd matrix_of(const QubitOperator& op);

// ---------------------------------------------------------------------------
// Fermionic operators
// ---------------------------------------------------------------------------

/// A single creation (create=true) or annihilation operator on a
/// spin-orbital index.
struct LadderOp {
  int index;
  bool create;

  friend bool operator==(const LadderOp&, const LadderOp&) = default;
  friend auto operator<=>(const LadderOp&, const LadderOp&) = default;
};

struct FermionTerm {
  double coefficient;
  std::vector<LadderOp> ops;  // applied right-to-left onto kets
};

/// Real-weighted sum of products of ladder operators over spin-orbitals.
/// Index convention: orbital p with spin alpha is p, with spin beta is
/// n_orbitals + p.
class FermionOperator {
 public:
  FermionOperator() = default;

  void add_term(double coefficient, std::vector<LadderOp> ops);

  FermionOperator& operator+=(const FermionOperator& other);
  FermionOperator& operator*=(double scale);
  friend FermionOperator operator+(FermionOperator a, const FermionOperator& b) { return a += b; }
  FermionOperator operator*(const FermionOperator& other) const;

  const std::vector<FermionTerm>& terms() const { return terms_; }

  /// Canonical form: creations first (ascending index), then
  /// annihilations (descending index); like terms merged, small
  /// coefficients pruned.
  FermionOperator normal_ordered() const;

  /// Equality after normal ordering, within tol on coefficients.
  bool equals(const FermionOperator& other, double tol = 1e-10) const;

  /// Largest spin-orbital index referenced (-1 for a constant operator).
  int max_index() const;

  std::string to_string() const;

 private:
  std::vector<FermionTerm> terms_;
};

/// Applies op to a vector over the occupation-number basis of
/// n_spin_orbitals modes (dimension 2^n_spin_orbitals). Basis state
/// `mask` is prod_{i in mask, ascending} a_i^dagger |vac>.
Eigen::VectorXd apply_to_fock(const FermionOperator& op, const Eigen::VectorXd& v,
                              int n_spin_orbitals);

// ---------------------------------------------------------------------------
// Active-space inputs
// ---------------------------------------------------------------------------

/// Core energy plus one-/two-body integrals in chemists' notation
/// (pq|rs), all in Hartree, over n_orbitals spatial orbitals.
class ActiveSpaceIntegrals {
 public:
  ActiveSpaceIntegrals() = default;
  ActiveSpaceIntegrals(int n_orbitals, double e_core);

  int n_orbitals() const { return n_orbitals_; }
  double e_core() const { return e_core_; }
  void set_e_core(double e) { e_core_ = e; }

  double one_body(int p, int q) const;
  void set_one_body(int p, int q, double value);  // stores value symmetrically

  double two_body(int p, int q, int r, int s) const;
  /// Stores (pq|rs) and its 8-fold symmetry images.
  void set_two_body(int p, int q, int r, int s, double value);

  const Eigen::MatrixXd& h1() const { return h1_; }

  /// Throws std::invalid_argument if h1 / h2 break their symmetries.
  void validate(double tol = 1e-10) const;

 private:
  std::size_t flat(int p, int q, int r, int s) const;

  int n_orbitals_ = 0;
  double e_core_ = 0.0;
  Eigen::MatrixXd h1_;
  std::vector<double> h2_;
};

/// Symmetry sector: electron count N and spin z-projection Sz
/// (stored doubled so half-integers stay exact).
struct SectorSpec {
  int n_electrons = 0;
  int twice_sz = 0;

  double sz() const { return 0.5 * twice_sz; }
  /// Number of alpha electrons implied by (N, Sz).
  int n_alpha() const { return (n_electrons + twice_sz) / 2; }
  int n_beta() const { return (n_electrons - twice_sz) / 2; }

  void validate(int n_orbitals) const;

  friend bool operator==(const SectorSpec&, const SectorSpec&) = default;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Spin-orbital index helpers for the all-alpha-then-all-beta layout.
inline int alpha_index(int orbital, int /*n_orbitals*/) { return orbital; }
inline int beta_index(int orbital, int n_orbitals) { return n_orbitals + orbital; }

/// Second-quantized active-space Hamiltonian
///   sum_pq h_pq a_p^+ a_q + 1/2 sum_pqrs (pq|rs) a_p^+ a_r^+ a_s a_q + e_core,
/// spin-summed over alpha/beta.
FermionOperator build_hamiltonian(const ActiveSpaceIntegrals& ints);

/// S^2 = S_- S_+ + S_z (S_z + 1) over the active spin-orbitals.
FermionOperator build_s2_operator(int n_orbitals);

/// Total electron-number operator (test and plumbing helper).
FermionOperator build_number_operator(int n_orbitals);

/// Parity mapping with two-qubit reduction for the 2-orbital, N=2, Sz=0
/// sector. The reduced basis follows the fixed dictionary
///   |00> = H-up L-down, |01> = H-up H-down,
///   |10> = L-up L-down, |11> = L-up H-down.
/// Throws UnsupportedSizeError outside CAS(2,2); rejects operators that
/// do not conserve (N, Sz).
QubitOperator map_parity_reduced(const FermionOperator& op, const SectorSpec& sector,
                                 int n_orbitals = 2);

/// The four dictionary determinants as occupation masks over 4
/// spin-orbitals, in reduced-basis order.
std::array<unsigned, 4> cas22_dictionary_masks();

}  // namespace vqcas
