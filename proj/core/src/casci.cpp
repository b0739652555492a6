#include <bit>
#include <cmath>
#include <map>

#include "vqcas/solve.hpp"

namespace vqcas {

namespace {

// Spin-orbital masks: alpha orbital p -> bit p, beta orbital p -> bit n+p,
// matching the fermion-operator index layout.
unsigned full_mask(const Determinant& d, int n_orbitals) {
  return d.alpha | (d.beta << n_orbitals);
}

int sign_remove(unsigned& mask, int index) {
  const unsigned bit = 1u << index;
  const int below = std::popcount(mask & (bit - 1));
  mask ^= bit;
  return (below & 1) ? -1 : 1;
}

int sign_add(unsigned& mask, int index) {
  const unsigned bit = 1u << index;
  const int below = std::popcount(mask & (bit - 1));
  mask |= bit;
  return (below & 1) ? -1 : 1;
}

struct SpinOrbital {
  int orbital;
  bool beta;
};

SpinOrbital split(int so_index, int n_orbitals) {
  return so_index < n_orbitals ? SpinOrbital{so_index, false}
                               : SpinOrbital{so_index - n_orbitals, true};
}

std::vector<unsigned> masks_with_popcount(int n_bits, int count) {
  std::vector<unsigned> out;
  for (unsigned mask = 0; mask < (1u << n_bits); ++mask)
    if (std::popcount(mask) == count) out.push_back(mask);
  return out;
}

}  // namespace

std::vector<Determinant> enumerate_determinants(int n_orbitals, const SectorSpec& sector) {
  sector.validate(n_orbitals);
  if (n_orbitals > 16) throw UnsupportedSizeError("enumerate_determinants: too many orbitals");
  const std::vector<unsigned> alphas = masks_with_popcount(n_orbitals, sector.n_alpha());
  const std::vector<unsigned> betas = masks_with_popcount(n_orbitals, sector.n_beta());
  std::vector<Determinant> dets;
  dets.reserve(alphas.size() * betas.size());
  for (unsigned a : alphas)
    for (unsigned b : betas) dets.push_back(Determinant{a, b});
  return dets;
}

double slater_condon_element(const ActiveSpaceIntegrals& ints, const Determinant& bra,
                             const Determinant& ket) {
  const int n = ints.n_orbitals();
  const unsigned bra_mask = full_mask(bra, n);
  const unsigned ket_mask = full_mask(ket, n);
  const unsigned removed_mask = ket_mask & ~bra_mask;
  const unsigned added_mask = bra_mask & ~ket_mask;
  const int degree = std::popcount(removed_mask);
  if (degree != std::popcount(added_mask) || degree > 2) return 0.0;

  auto occupied_list = [n](unsigned mask) {
    std::vector<SpinOrbital> occ;
    for (int i = 0; i < 2 * n; ++i)
      if ((mask >> i) & 1) occ.push_back(split(i, n));
    return occ;
  };

  if (degree == 0) {
    // Diagonal: sum h + 1/2 sum (Coulomb - same-spin exchange).
    const std::vector<SpinOrbital> occ = occupied_list(ket_mask);
    double value = 0.0;
    for (const SpinOrbital& i : occ) value += ints.one_body(i.orbital, i.orbital);
    for (const SpinOrbital& i : occ)
      for (const SpinOrbital& j : occ) {
        value += 0.5 * ints.two_body(i.orbital, i.orbital, j.orbital, j.orbital);
        if (i.beta == j.beta)
          value -= 0.5 * ints.two_body(i.orbital, j.orbital, j.orbital, i.orbital);
      }
    // The i == j Coulomb and exchange contributions cancel exactly.
    return value;
  }

  if (degree == 1) {
    const int m = std::countr_zero(removed_mask);
    const int p = std::countr_zero(added_mask);
    const SpinOrbital from = split(m, n);
    const SpinOrbital to = split(p, n);
    if (from.beta != to.beta) return 0.0;

    unsigned work = ket_mask;
    int sign = sign_remove(work, m);
    sign *= sign_add(work, p);

    double value = ints.one_body(to.orbital, from.orbital);
    for (const SpinOrbital& k : occupied_list(ket_mask & bra_mask)) {
      value += ints.two_body(to.orbital, from.orbital, k.orbital, k.orbital);
      if (k.beta == from.beta)
        value -= ints.two_body(to.orbital, k.orbital, k.orbital, from.orbital);
    }
    return sign * value;
  }

  // degree == 2
  const int m1 = std::countr_zero(removed_mask);
  const int m2 = std::countr_zero(removed_mask & (removed_mask - 1));
  const int p1 = std::countr_zero(added_mask);
  const int p2 = std::countr_zero(added_mask & (added_mask - 1));
  const SpinOrbital fm1 = split(m1, n), fm2 = split(m2, n);
  const SpinOrbital tp1 = split(p1, n), tp2 = split(p2, n);

  // Operator order a^+_{p1} a^+_{p2} a_{m2} a_{m1}: removals ascend,
  // additions descend.
  unsigned work = ket_mask;
  int sign = sign_remove(work, m1);
  sign *= sign_remove(work, m2);
  sign *= sign_add(work, p2);
  sign *= sign_add(work, p1);

  double direct = 0.0, exchange = 0.0;
  if (tp1.beta == fm1.beta && tp2.beta == fm2.beta)
    direct = ints.two_body(tp1.orbital, fm1.orbital, tp2.orbital, fm2.orbital);
  if (tp1.beta == fm2.beta && tp2.beta == fm1.beta)
    exchange = ints.two_body(tp1.orbital, fm2.orbital, tp2.orbital, fm1.orbital);
  return sign * (direct - exchange);
}

Eigen::MatrixXd sector_hamiltonian_matrix(const ActiveSpaceIntegrals& ints,
                                          const SectorSpec& sector) {
  ints.validate();
  const std::vector<Determinant> dets = enumerate_determinants(ints.n_orbitals(), sector);
  const long dim = static_cast<long>(dets.size());
  Eigen::MatrixXd h(dim, dim);
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j)
      h(i, j) = slater_condon_element(ints, dets[static_cast<std::size_t>(i)],
                                      dets[static_cast<std::size_t>(j)]);
  h.diagonal().array() += ints.e_core();
  return h;
}

std::vector<CasciState> exact_casci(const ActiveSpaceIntegrals& ints, const SectorSpec& sector,
                                    int k) {
  const std::vector<Determinant> dets = enumerate_determinants(ints.n_orbitals(), sector);
  if (dets.size() > 4096) throw UnsupportedSizeError("exact_casci: more than 4096 determinants");
  if (dets.empty()) throw std::invalid_argument("exact_casci: empty sector");

  const Eigen::MatrixXd h = sector_hamiltonian_matrix(ints, sector);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);

  const int n_states = std::min<int>(k, static_cast<int>(dets.size()));
  std::vector<CasciState> states;
  states.reserve(static_cast<std::size_t>(n_states));
  for (int i = 0; i < n_states; ++i)
    states.push_back(CasciState{eig.eigenvalues()(i), eig.eigenvectors().col(i)});
  return states;
}

double casci_spin_squared(const Eigen::VectorXd& coefficients, int n_orbitals,
                          const SectorSpec& sector) {
  const std::vector<Determinant> dets = enumerate_determinants(n_orbitals, sector);
  if (coefficients.size() != static_cast<long>(dets.size()))
    throw std::invalid_argument("casci_spin_squared: dimension mismatch");

  std::map<std::pair<unsigned, unsigned>, long> index;
  for (std::size_t i = 0; i < dets.size(); ++i)
    index[{dets[i].alpha, dets[i].beta}] = static_cast<long>(i);

  // <S^2> = |S+ v|^2 + sz(sz+1). S+ lifts one beta electron to the alpha
  // spot of the same orbital; targets live in the (N, Sz+1) sector.
  std::map<std::pair<unsigned, unsigned>, double> lifted;
  for (std::size_t j = 0; j < dets.size(); ++j) {
    const double cj = coefficients[static_cast<long>(j)];
    if (cj == 0.0) continue;
    for (int p = 0; p < n_orbitals; ++p) {
      const Determinant& d = dets[j];
      if (!((d.beta >> p) & 1) || ((d.alpha >> p) & 1)) continue;
      unsigned work = full_mask(d, n_orbitals);
      int sign = sign_remove(work, n_orbitals + p);
      sign *= sign_add(work, p);
      const unsigned alpha = work & ((1u << n_orbitals) - 1);
      const unsigned beta = work >> n_orbitals;
      lifted[{alpha, beta}] += sign * cj;
    }
  }
  double s_plus_norm2 = 0.0;
  for (const auto& [det, amp] : lifted) s_plus_norm2 += amp * amp;

  const double sz = sector.sz();
  return s_plus_norm2 + sz * (sz + 1.0);
}

}  // namespace vqcas
