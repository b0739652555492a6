#include <cmath>

#include "vqcas/qop.hpp"

namespace vqcas {

FermionOperator build_hamiltonian(const ActiveSpaceIntegrals& ints) {
  ints.validate();
  const int n = ints.n_orbitals();
  FermionOperator h;

  if (ints.e_core() != 0.0) h.add_term(ints.e_core(), {});

  // One-body part, spin-summed: sum_pq h_pq (a^+_pa a_qa + a^+_pb a_qb).
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      const double hpq = ints.one_body(p, q);
      if (std::abs(hpq) < kCoefficientCutoff) continue;
      for (int spin = 0; spin < 2; ++spin) {
        const int pi = spin ? beta_index(p, n) : alpha_index(p, n);
        const int qi = spin ? beta_index(q, n) : alpha_index(q, n);
        h.add_term(hpq, {{pi, true}, {qi, false}});
      }
    }
  }

  // Two-body part in chemists' notation:
  //   1/2 sum_pqrs (pq|rs) sum_{sigma,tau} a^+_ps a^+_rt a_st a_qs.
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double g = ints.two_body(p, q, r, s);
          if (std::abs(g) < kCoefficientCutoff) continue;
          for (int sig = 0; sig < 2; ++sig)
            for (int tau = 0; tau < 2; ++tau) {
              const int pi = sig ? beta_index(p, n) : p;
              const int qi = sig ? beta_index(q, n) : q;
              const int ri = tau ? beta_index(r, n) : r;
              const int si = tau ? beta_index(s, n) : s;
              h.add_term(0.5 * g, {{pi, true}, {ri, true}, {si, false}, {qi, false}});
            }
        }

  return h.normal_ordered();
}

FermionOperator build_s2_operator(int n_orbitals) {
  if (n_orbitals < 1) throw std::invalid_argument("build_s2_operator: n_orbitals must be >= 1");
  const int n = n_orbitals;

  FermionOperator s_plus;   // sum_p a^+_pa a_pb
  FermionOperator s_minus;  // sum_p a^+_pb a_pa
  FermionOperator s_z;      // 1/2 sum_p (n_pa - n_pb)
  for (int p = 0; p < n; ++p) {
    s_plus.add_term(1.0, {{alpha_index(p, n), true}, {beta_index(p, n), false}});
    s_minus.add_term(1.0, {{beta_index(p, n), true}, {alpha_index(p, n), false}});
    s_z.add_term(0.5, {{alpha_index(p, n), true}, {alpha_index(p, n), false}});
    s_z.add_term(-0.5, {{beta_index(p, n), true}, {beta_index(p, n), false}});
  }

  FermionOperator s2 = s_minus * s_plus;
  s2 += s_z * s_z;
  s2 += s_z;
  return s2.normal_ordered();
}

FermionOperator build_number_operator(int n_orbitals) {
  FermionOperator num;
  for (int i = 0; i < 2 * n_orbitals; ++i) num.add_term(1.0, {{i, true}, {i, false}});
  return num;
}

}  // namespace vqcas
