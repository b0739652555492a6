#include <cmath>
#include <random>

#include <doctest.h>

#include "test_helpers.hpp"
#include "vqcas/solve.hpp"

using namespace vqcas;
using namespace vqcas::testing;

namespace {

const double kRoot5 = std::sqrt(5.0);

struct MappedProblem {
  ActiveSpaceIntegrals ints;
  QubitOperator h;
  QubitOperator s2;
  std::vector<double> singlet_energies;
  std::vector<double> all_energies;
};

MappedProblem mapped_problem(const ActiveSpaceIntegrals& ints) {
  MappedProblem p{ints, map_parity_reduced(build_hamiltonian(ints), cas22_sector()),
                  map_parity_reduced(build_s2_operator(2), cas22_sector()), {}, {}};
  for (const CasciState& s : exact_casci(ints, cas22_sector(), 4)) {
    p.all_energies.push_back(s.energy);
    if (casci_spin_squared(s.coefficients, 2, cas22_sector()) < 0.5)
      p.singlet_energies.push_back(s.energy);
  }
  return p;
}

OptimizerConfig tight_config() {
  OptimizerConfig cfg;
  cfg.max_evaluations = 400;
  cfg.rho_end = 1e-6;
  cfg.f_tolerance = 1e-8;
  return cfg;
}

}  // namespace

TEST_CASE("vqe reaches the hubbard ground state") {
  const MappedProblem p = mapped_problem(hubbard_integrals(1.0, 2.0));
  const SolveResult r =
      vqe(p.h, AnsatzKind::spin_restricted(), Backend::statevector(), OptimizerConfig{}, &p.s2);
  CHECK(std::abs(r.energy - (1.0 - kRoot5)) < 1e-4);
  CHECK(std::abs(r.s_squared) < 1e-10);
  CHECK(r.opt.n_evaluations <= 100);
  // Reported energy is the plain expectation at theta*.
  const double recomputed =
      expectation(run_statevector(build(AnsatzKind::spin_restricted(), r.theta_star)), p.h);
  CHECK(r.energy == doctest::Approx(recomputed).epsilon(1e-12));
}

TEST_CASE("vqe on a constant operator needs no progress") {
  const QubitOperator constant = QubitOperator::identity(2, -0.75);
  const SolveResult r =
      vqe(constant, AnsatzKind::spin_restricted(), Backend::statevector(), OptimizerConfig{});
  CHECK(r.energy == doctest::Approx(-0.75).epsilon(1e-12));
}

TEST_CASE("noisy vqe with purification lands near the oracle") {
  // Integral scale comparable to a small-molecule CAS(2,2); 32768 shots
  // keep the shot noise from dominating the optimizer path.
  const MappedProblem p = mapped_problem(hubbard_integrals(0.2, 0.4));
  NoiseModel nm = NoiseModel::default_synthetic(2, 1);
  nm.shots = 32768;
  const SolveResult r = vqe(p.h, AnsatzKind::spin_restricted(),
                            Backend::noisy_sampled(nm, true, true), OptimizerConfig{}, &p.s2);
  CHECK(std::abs(r.energy - p.singlet_energies[0]) < 2e-3);
  CHECK(r.purified_weight > 0.9);
  CHECK(!r.poor_refit);
}

TEST_CASE("vqd deflation finds the first excited singlet") {
  const MappedProblem p = mapped_problem(hubbard_integrals(1.0, 2.0));
  const AnsatzKind kind = AnsatzKind::spin_restricted();
  const Backend sv = Backend::statevector();
  const SolveResult ground = vqe(p.h, kind, sv, OptimizerConfig{}, &p.s2);

  SUBCASE("beta above the gap targets S1") {
    const SolveResult r =
        vqd(p.h, kind, sv, OptimizerConfig{}, {ground.theta_star}, VQDConfig{5.0, 0.0}, p.s2);
    CHECK(std::abs(r.energy - 2.0) < 1e-4);
    REQUIRE(r.overlaps_with_lower.size() == 1);
    CHECK(r.overlaps_with_lower[0] < 1e-6);
    CHECK(std::abs(r.s_squared) < 1e-10);
  }

  SUBCASE("beta zero collapses to the ground state") {
    const SolveResult r =
        vqd(p.h, kind, sv, OptimizerConfig{}, {ground.theta_star}, VQDConfig{0.0, 0.0}, p.s2);
    CHECK(std::abs(r.energy - (1.0 - kRoot5)) < 1e-4);
  }

  SUBCASE("beta below the gap also collapses") {
    // The S0-S1 gap is 1+sqrt(5), so beta = 1 leaves the ground state as
    // the cost minimum (cost E0 + beta < E1).
    const SolveResult r =
        vqd(p.h, kind, sv, tight_config(), {ground.theta_star}, VQDConfig{1.0, 0.0}, p.s2);
    CHECK(std::abs(r.energy - (1.0 - kRoot5)) < 1e-3);
  }
}

TEST_CASE("vqd spin penalty steers a heuristic ansatz off the triplet") {
  const MappedProblem p = mapped_problem(hubbard_integrals(1.0, 2.0));
  const AnsatzKind ra2 = AnsatzKind::real_amplitudes(2);
  const Backend sv = Backend::statevector();
  OptimizerConfig cfg = tight_config();
  cfg.max_evaluations = 1200;

  const SolveResult ground = vqe(p.h, ra2, sv, cfg, &p.s2);
  CHECK(std::abs(ground.energy - (1.0 - kRoot5)) < 1e-3);

  // C1 (gamma = 0): the triplet at E = 0 undercuts the singlet S1.
  const SolveResult triplet =
      vqd(p.h, ra2, sv, cfg, {ground.theta_star}, VQDConfig{5.0, 0.0}, p.s2);
  CHECK(std::abs(triplet.energy - 0.0) < 1e-2);
  CHECK(triplet.s_squared > 1.5);

  // C2 with gamma > (E_S1 - E_T)/2 makes S1 the unique cost minimum.
  const SolveResult singlet =
      vqd(p.h, ra2, sv, cfg, {ground.theta_star}, VQDConfig{5.0, 2.5}, p.s2);
  CHECK(std::abs(singlet.energy - 2.0) < 1e-2);
  CHECK(singlet.s_squared < 0.1);
}

TEST_CASE("vqe_ac matches the oracle excited states") {
  const MappedProblem p = mapped_problem(hubbard_integrals(1.0, 2.0));
  const AnsatzKind kind = AnsatzKind::spin_restricted();
  const Backend sv = Backend::statevector();
  // The sharp constrained-optimum check below needs a precise lower
  // state, since the overlap bound is measured against it.
  const SolveResult ground = vqe(p.h, kind, sv, tight_config(), &p.s2);

  SUBCASE("one lower state gives S1") {
    // With the overlap bound active, the exact constrained optimum is
    // eps*E0 + (1-eps)*E1, an eps*gap offset below E1.
    const double eps = 1e-4;
    const SolveResult r = vqe_ac(p.h, kind, sv, tight_config(), {ground.theta_star}, eps, &p.s2);
    const double constrained_optimum = eps * (1.0 - kRoot5) + (1.0 - eps) * 2.0;
    CHECK(std::abs(r.energy - constrained_optimum) < 1e-5);
    CHECK(std::abs(r.energy - 2.0) < 1e-3);
    REQUIRE(r.overlaps_with_lower.size() == 1);
    CHECK(r.overlaps_with_lower[0] <= eps + 1e-9);
    CHECK(!r.constraint_warning);
  }

  SUBCASE("no lower states reduces to vqe") {
    const SolveResult r = vqe_ac(p.h, kind, sv, OptimizerConfig{}, {}, 1e-4, &p.s2);
    CHECK(std::abs(r.energy - (1.0 - kRoot5)) < 1e-4);
  }

  SUBCASE("two lower states reach the second excited singlet") {
    const SolveResult s1 = vqe_ac(p.h, kind, sv, tight_config(), {ground.theta_star}, 1e-4, &p.s2);
    const SolveResult s2r = vqe_ac(p.h, kind, sv, tight_config(),
                                   {ground.theta_star, s1.theta_star}, 1e-4, &p.s2);
    CHECK(std::abs(s2r.energy - (1.0 + kRoot5)) < 1e-3);
    for (double ov : s2r.overlaps_with_lower) CHECK(ov <= 1e-4 + 1e-9);
    CHECK(s2r.s_squared < 1e-8);
  }
}

TEST_CASE("vqd and vqe_ac agree on the excited energy") {
  const MappedProblem p = mapped_problem(hubbard_integrals(1.0, 2.0));
  const AnsatzKind kind = AnsatzKind::spin_restricted();
  const Backend sv = Backend::statevector();
  const SolveResult ground = vqe(p.h, kind, sv, OptimizerConfig{}, &p.s2);
  const SolveResult a =
      vqd(p.h, kind, sv, OptimizerConfig{}, {ground.theta_star}, VQDConfig{5.0, 0.0}, p.s2);
  const SolveResult b = vqe_ac(p.h, kind, sv, OptimizerConfig{}, {ground.theta_star}, 1e-4, &p.s2);
  CHECK(std::abs(a.energy - b.energy) < 1e-3);
}

TEST_CASE("solve ordering is monotone in the number of constraints") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    const MappedProblem p = mapped_problem(random_singlet_ground_integrals(rng));
    const AnsatzKind kind = AnsatzKind::spin_restricted();
    const Backend sv = Backend::statevector();
    const SolveResult e0 = vqe(p.h, kind, sv, tight_config(), &p.s2);
    const SolveResult e1 = vqe_ac(p.h, kind, sv, tight_config(), {e0.theta_star}, 1e-4, &p.s2);
    const SolveResult e2 =
        vqe_ac(p.h, kind, sv, tight_config(), {e0.theta_star, e1.theta_star}, 1e-4, &p.s2);
    CHECK(e0.energy <= e1.energy + 1e-8);
    CHECK(e1.energy <= e2.energy + 1e-8);
  }
}

TEST_CASE("variational bound against the oracle") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int instance = 0; instance < 20; ++instance) {
    const MappedProblem p = mapped_problem(random_integrals(rng));
    const double ground = p.all_energies[0];
    for (int k = 0; k < 50; ++k) {
      const Statevector psi = spin_restricted_state(angle(rng), angle(rng));
      CHECK(expectation(psi, p.h) >= ground - 1e-10);
    }
  }
}

TEST_CASE("measure_overlap endpoints") {
  const AnsatzKind kind = AnsatzKind::spin_restricted();
  const Backend sv = Backend::statevector();
  CHECK(measure_overlap({{0.4, 1.7}}, {{0.4, 1.7}}, kind, sv) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(measure_overlap({{0.0, M_PI}}, {{M_PI, M_PI}}, kind, sv) < 1e-12);

  NoiseModel nm = NoiseModel::default_synthetic(2, 21);
  const Backend noisy = Backend::noisy_sampled(nm, true, false);
  CHECK(measure_overlap({{0.7, 2.1}}, {{0.7, 2.1}}, kind, noisy) >= 0.9);
}

TEST_CASE("measure_s_squared across backends") {
  const QubitOperator s2 = map_parity_reduced(build_s2_operator(2), cas22_sector());
  const AnsatzKind sr = AnsatzKind::spin_restricted();
  const Backend sv = Backend::statevector();
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int i = 0; i < 50; ++i)
    CHECK(std::abs(measure_s_squared({{angle(rng), angle(rng)}}, sr, sv, s2)) < 1e-10);

  // RealAmplitudes parameters preparing the triplet (|00> - |11>)/sqrt(2).
  const AnsatzKind ra1 = AnsatzKind::real_amplitudes(1);
  const AnsatzParameters triplet_params{{-M_PI / 2, 0.0, 0.0, 0.0}};
  CHECK(measure_s_squared(triplet_params, ra1, sv, s2) == doctest::Approx(2.0).epsilon(1e-10));

  NoiseModel nm = NoiseModel::default_synthetic(2, 23);
  const Backend noisy = Backend::noisy_sampled(nm, true, false);
  CHECK(measure_s_squared({{0.3, 2.4}}, sr, noisy, s2) < 0.1);
}

TEST_CASE("rdm measurement reproduces occupation and energy") {
  const SectorSpec sector = cas22_sector();
  const AnsatzKind kind = AnsatzKind::spin_restricted();
  const Backend sv = Backend::statevector();

  // HF state |01>: doubly occupied HOMO.
  const RDMPair hf = measure_rdms({{0.0, M_PI}}, kind, sv, sector);
  CHECK(hf.one_rdm(0, 0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(hf.one_rdm(1, 1) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(std::abs(hf.one_rdm(0, 1)) < 1e-10);

  // Hubbard ground state: the RDM energy identity.
  const MappedProblem p = mapped_problem(hubbard_integrals(1.0, 2.0));
  const SolveResult ground = vqe(p.h, kind, sv, tight_config(), &p.s2);
  const RDMPair rdms = measure_rdms(ground.theta_star, kind, sv, sector);
  CHECK(rdm_energy(rdms, p.ints) == doctest::Approx(1.0 - kRoot5).epsilon(1e-6));

  // Trace, symmetry, and the partial-trace identity hold everywhere.
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> a(-M_PI, M_PI);
  for (int i = 0; i < 5; ++i) {
    const RDMPair r = measure_rdms({{a(rng), a(rng)}}, kind, sv, sector);
    CHECK(r.one_rdm.trace() == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(std::abs(r.one_rdm(0, 1) - r.one_rdm(1, 0)) < 1e-8);
    for (int pidx = 0; pidx < 2; ++pidx)
      for (int q = 0; q < 2; ++q) {
        double traced = 0.0;
        for (int t = 0; t < 2; ++t) traced += r.two(pidx, q, t, t);
        CHECK(traced == doctest::Approx((2.0 - 1.0) * r.one_rdm(pidx, q)).epsilon(1e-6));
      }
  }
}

TEST_CASE("state averaging") {
  const SectorSpec sector = cas22_sector();
  const AnsatzKind kind = AnsatzKind::spin_restricted();
  const Backend sv = Backend::statevector();
  const RDMPair a = measure_rdms({{0.0, M_PI}}, kind, sv, sector);   // gamma = diag(2, 0)
  const RDMPair b = measure_rdms({{M_PI, M_PI}}, kind, sv, sector);  // gamma = diag(0, 2)

  const RDMPair first = state_average_rdms({a, b}, {1.0, 0.0});
  CHECK((first.one_rdm - a.one_rdm).cwiseAbs().maxCoeff() < 1e-12);

  const RDMPair even = state_average_rdms({a, b}, {0.5, 0.5});
  CHECK(even.one_rdm(0, 0) == doctest::Approx(1.0));
  CHECK(even.one_rdm(1, 1) == doctest::Approx(1.0));
  CHECK(even.one_rdm.trace() == doctest::Approx(2.0));
  REQUIRE(even.weights.size() == 2);

  CHECK_THROWS_AS(state_average_rdms({a, b}, {0.7, 0.7}), std::invalid_argument);
  CHECK_THROWS_AS(state_average_rdms({a, b}, {1.5, -0.5}), std::invalid_argument);
}

TEST_CASE("exact_casci determinant guard") {
  ActiveSpaceIntegrals medium(6, 0.0);
  CHECK_NOTHROW(exact_casci(medium, SectorSpec{6, 0}, 1));  // C(6,3)^2 = 400 determinants
  ActiveSpaceIntegrals big(8, 0.0);
  // C(8,4)^2 = 4900 exceeds the guard.
  CHECK_THROWS_AS(exact_casci(big, SectorSpec{8, 0}, 1), UnsupportedSizeError);
}

TEST_CASE("solvers accept a starting-point override") {
  const MappedProblem p = mapped_problem(hubbard_integrals(1.0, 2.0));
  const AnsatzParameters start{{1.2, 2.0}};
  const SolveResult r = vqe(p.h, AnsatzKind::spin_restricted(), Backend::statevector(),
                            tight_config(), &p.s2, &start);
  CHECK(std::abs(r.energy - (1.0 - kRoot5)) < 1e-4);
  CHECK(r.opt.history.front().first == start.values);

  const AnsatzParameters wrong{{0.1}};
  CHECK_THROWS_AS(vqe(p.h, AnsatzKind::spin_restricted(), Backend::statevector(), tight_config(),
                      &p.s2, &wrong),
                  std::invalid_argument);
}

TEST_CASE("backend validation") {
  CHECK_THROWS_AS(
      [] {
        Backend b;
        b.purified = true;
        b.validate();
      }(),
      std::invalid_argument);
}
