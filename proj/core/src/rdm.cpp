#include <cmath>

#include "vqcas/solve.hpp"

namespace vqcas {

double RDMPair::two(int p, int q, int r, int s) const {
  const auto n = static_cast<std::size_t>(n_orbitals);
  return two_rdm[((static_cast<std::size_t>(p) * n + static_cast<std::size_t>(q)) * n +
                  static_cast<std::size_t>(r)) *
                     n +
                 static_cast<std::size_t>(s)];
}

double& RDMPair::two(int p, int q, int r, int s) {
  const auto n = static_cast<std::size_t>(n_orbitals);
  return two_rdm[((static_cast<std::size_t>(p) * n + static_cast<std::size_t>(q)) * n +
                  static_cast<std::size_t>(r)) *
                     n +
                 static_cast<std::size_t>(s)];
}

RDMPair RDMPair::zero(int n_orbitals) {
  RDMPair rdms;
  rdms.n_orbitals = n_orbitals;
  rdms.one_rdm = Eigen::MatrixXd::Zero(n_orbitals, n_orbitals);
  const auto n = static_cast<std::size_t>(n_orbitals);
  rdms.two_rdm.assign(n * n * n * n, 0.0);
  return rdms;
}

namespace {

// Spin-summed single excitation E_pq = sum_sigma a^+_ps a_qs.
FermionOperator excitation_op(int p, int q, int n) {
  FermionOperator e;
  e.add_term(1.0, {{alpha_index(p, n), true}, {alpha_index(q, n), false}});
  e.add_term(1.0, {{beta_index(p, n), true}, {beta_index(q, n), false}});
  return e;
}

// Gamma_(pq)(rs) measurement operator sum_st a^+_ps a^+_rt a_st a_qs.
FermionOperator pair_op(int p, int q, int r, int s, int n) {
  FermionOperator g;
  for (int sig = 0; sig < 2; ++sig)
    for (int tau = 0; tau < 2; ++tau) {
      const int pi = sig ? beta_index(p, n) : p;
      const int qi = sig ? beta_index(q, n) : q;
      const int ri = tau ? beta_index(r, n) : r;
      const int si = tau ? beta_index(s, n) : s;
      g.add_term(1.0, {{pi, true}, {ri, true}, {si, false}, {qi, false}});
    }
  return g;
}

// Hermitian part of the mapped operator; real states make its
// expectation equal the full element.
QubitOperator mapped_hermitian_part(const FermionOperator& op, const SectorSpec& sector, int n) {
  const QubitOperator mapped = map_parity_reduced(op, sector, n);
  QubitOperator herm(mapped.n_qubits());
  for (const PauliTerm& term : mapped.terms()) herm.add_term(term.coefficient.real(), term.word);
  return herm;
}

}  // namespace

RDMPair measure_rdms(const AnsatzParameters& theta, const AnsatzKind& kind,
                     const Backend& backend, const SectorSpec& sector) {
  const int n = 2;  // the reduced mapping fixes CAS(2,2)
  sector.validate(n);
  backend.validate();

  // All backends reduce to expectations on one prepared state.
  Statevector psi;
  bool have_pure = false;
  std::optional<Eigen::MatrixXd> calibration;
  const Circuit circuit = build(kind, theta);
  if (backend.is_statevector()) {
    psi = run_statevector(circuit);
    have_pure = true;
  } else if (backend.purified) {
    psi = purify(tomography(circuit, backend.noise)).psi;
    have_pure = true;
  } else if (backend.mitigated) {
    calibration = readout_calibrate(backend.noise, kind.n_qubits);
  }

  auto measure = [&](const FermionOperator& op) {
    const QubitOperator mapped = mapped_hermitian_part(op, sector, n);
    if (have_pure) return expectation(psi, mapped);
    return estimate_expectation(circuit, mapped, backend.noise, backend.mitigated,
                                calibration ? &*calibration : nullptr)
        .value;
  };

  RDMPair rdms = RDMPair::zero(n);
  for (int p = 0; p < n; ++p) {
    rdms.one_rdm(p, p) = measure(excitation_op(p, p, n));
    for (int q = p + 1; q < n; ++q) {
      FermionOperator sym = excitation_op(p, q, n);
      sym += excitation_op(q, p, n);
      sym *= 0.5;
      const double value = measure(sym);
      rdms.one_rdm(p, q) = value;
      rdms.one_rdm(q, p) = value;
    }
  }

  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          // Hermitian conjugate element lives at (qp)(sr).
          FermionOperator sym = pair_op(p, q, r, s, n);
          sym += pair_op(q, p, s, r, n);
          sym *= 0.5;
          rdms.two(p, q, r, s) = measure(sym);
        }
  return rdms;
}

RDMPair state_average_rdms(const std::vector<RDMPair>& rdms, const std::vector<double>& weights) {
  if (rdms.empty() || rdms.size() != weights.size())
    throw std::invalid_argument("state_average_rdms: shape mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0) throw std::invalid_argument("state_average_rdms: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw std::invalid_argument("state_average_rdms: weights must sum to 1");

  RDMPair out = RDMPair::zero(rdms[0].n_orbitals);
  for (std::size_t k = 0; k < rdms.size(); ++k) {
    if (rdms[k].n_orbitals != out.n_orbitals)
      throw std::invalid_argument("state_average_rdms: mixed shapes");
    out.one_rdm += weights[k] * rdms[k].one_rdm;
    for (std::size_t i = 0; i < out.two_rdm.size(); ++i)
      out.two_rdm[i] += weights[k] * rdms[k].two_rdm[i];
  }
  out.weights = weights;
  return out;
}

double rdm_energy(const RDMPair& rdms, const ActiveSpaceIntegrals& ints) {
  if (rdms.n_orbitals != ints.n_orbitals())
    throw std::invalid_argument("rdm_energy: orbital count mismatch");
  const int n = rdms.n_orbitals;
  double energy = ints.e_core();
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) energy += ints.one_body(p, q) * rdms.one_rdm(p, q);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          energy += 0.5 * ints.two_body(p, q, r, s) * rdms.two(p, q, r, s);
  return energy;
}

}  // namespace vqcas
