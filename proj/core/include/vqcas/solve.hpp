#pragma once

// Ground- and excited-state solvers (VQE, VQD, overlap-constrained VQE),
// overlap / spin-squared / RDM measurement, and the exact-diagonalization
// CASCI oracle every other result is validated against.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "vqcas/ansatz.hpp"
#include "vqcas/opt.hpp"
#include "vqcas/qop.hpp"
#include "vqcas/sim.hpp"

namespace vqcas {

// ---------------------------------------------------------------------------
// Exact diagonalization oracle
// ---------------------------------------------------------------------------

/// Occupation bitmasks over spatial orbitals, one per spin.
struct Determinant {
  unsigned alpha = 0;
  unsigned beta = 0;

  friend bool operator==(const Determinant&, const Determinant&) = default;
};

/// All determinants of the (N, Sz) sector, alpha-major ordering.
std::vector<Determinant> enumerate_determinants(int n_orbitals, const SectorSpec& sector);

/// <bra|H|ket> from Slater-Condon rules over chemists'-notation
/// integrals. Independent of the fermion-operator / qubit-mapping path.
double slater_condon_element(const ActiveSpaceIntegrals& ints, const Determinant& bra,
                             const Determinant& ket);

/// Sector Hamiltonian matrix in the enumerate_determinants basis.
Eigen::MatrixXd sector_hamiltonian_matrix(const ActiveSpaceIntegrals& ints,
                                          const SectorSpec& sector);

struct CasciState {
  double energy = 0.0;
  Eigen::VectorXd coefficients;  // over the determinant basis
};

/// k lowest eigenpairs, ascending. Guarded at 4096 determinants.
std::vector<CasciState> exact_casci(const ActiveSpaceIntegrals& ints, const SectorSpec& sector,
                                    int k);

/// <S^2> of a CI vector in the enumerate_determinants basis.
double casci_spin_squared(const Eigen::VectorXd& coefficients, int n_orbitals,
                          const SectorSpec& sector);

// ---------------------------------------------------------------------------
// Variational solvers
// ---------------------------------------------------------------------------

struct Backend {
  enum class Mode { Statevector, NoisySampled };
  Mode mode = Mode::Statevector;
  NoiseModel noise;
  bool mitigated = false;
  bool purified = false;

  static Backend statevector();
  static Backend noisy_sampled(const NoiseModel& nm, bool mitigated, bool purified);

  bool is_statevector() const { return mode == Mode::Statevector; }
  void validate() const;
};

/// Overlap (beta) and spin (gamma) penalty weights of the deflation cost
/// C2 = <H> + beta sum |<Psi|Psi_i>|^2 + gamma <S^2>; C1 is gamma = 0.
struct VQDConfig {
  double beta = 5.0;
  double gamma = 0.0;

  /// The studied penalty presets {0, 1, 2.5, 5, 10}.
  static const std::vector<double>& beta_presets();
};

struct SolveResult {
  AnsatzParameters theta_star;
  double energy = 0.0;      // <H> alone; penalty terms never included
  double s_squared = 0.0;   // NaN when no S^2 operator was supplied
  std::vector<double> overlaps_with_lower;
  OptResult opt;
  bool constraint_warning = false;  // VQE/AC left infeasible at budget
  bool poor_refit = false;          // purified-mode parameter refit fell short
  double purified_weight = 1.0;     // dominant eigenvalue in purified mode
};

/// Every solver starts from initial_parameters(kind) unless `start`
/// overrides it.
SolveResult vqe(const QubitOperator& hamiltonian, const AnsatzKind& kind, const Backend& backend,
                const OptimizerConfig& cfg, const QubitOperator* s2 = nullptr,
                const AnsatzParameters* start = nullptr);

SolveResult vqd(const QubitOperator& hamiltonian, const AnsatzKind& kind, const Backend& backend,
                const OptimizerConfig& cfg, const std::vector<AnsatzParameters>& lower,
                const VQDConfig& vqd_cfg, const QubitOperator& s2,
                const AnsatzParameters* start = nullptr);

SolveResult vqe_ac(const QubitOperator& hamiltonian, const AnsatzKind& kind,
                   const Backend& backend, const OptimizerConfig& cfg,
                   const std::vector<AnsatzParameters>& lower, double epsilon = 1e-4,
                   const QubitOperator* s2 = nullptr, const AnsatzParameters* start = nullptr);

/// |<Psi(theta_a)|Psi(theta_b)>|^2: exact in statevector mode, otherwise
/// the all-zeros probability of U(theta_a)^-1 U(theta_b).
double measure_overlap(const AnsatzParameters& theta_a, const AnsatzParameters& theta_b,
                       const AnsatzKind& kind, const Backend& backend);

double measure_s_squared(const AnsatzParameters& theta, const AnsatzKind& kind,
                         const Backend& backend, const QubitOperator& s2);

// ---------------------------------------------------------------------------
// Reduced density matrices
// ---------------------------------------------------------------------------

/// Spin-summed 1-RDM gamma_pq = <sum_s a^+_ps a_qs> and chemists'-pairing
/// 2-RDM Gamma_(pq)(rs) = <sum_st a^+_ps a^+_rt a_st a_qs>, so that
/// E = sum h.gamma + 1/2 sum (pq|rs) Gamma + e_core.
struct RDMPair {
  int n_orbitals = 0;
  Eigen::MatrixXd one_rdm;
  std::vector<double> two_rdm;  // flattened [p][q][r][s]
  std::vector<double> weights;  // state-averaging weights used (empty = single state)

  double two(int p, int q, int r, int s) const;
  double& two(int p, int q, int r, int s);

  static RDMPair zero(int n_orbitals);
};

RDMPair measure_rdms(const AnsatzParameters& theta, const AnsatzKind& kind,
                     const Backend& backend, const SectorSpec& sector);

/// Element-wise convex combination; weights must be nonnegative and sum
/// to 1.
RDMPair state_average_rdms(const std::vector<RDMPair>& rdms, const std::vector<double>& weights);

/// Tr(h1 gamma) + 1/2 sum Gamma.(pq|rs) + e_core.
double rdm_energy(const RDMPair& rdms, const ActiveSpaceIntegrals& ints);

}  // namespace vqcas
