#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>

#include "test_helpers.hpp"
#include "vqcas/chem.hpp"

using namespace vqcas;
using namespace vqcas::testing;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("vqcas_chem_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

FcidumpData hubbard_data() {
  FcidumpData data;
  data.integrals = hubbard_integrals(1.0, 2.0);
  data.n_electrons = 2;
  data.ms2 = 0;
  return data;
}

SolverSettings fast_settings() {
  SolverSettings settings;
  settings.opt.max_evaluations = 400;
  settings.opt.rho_end = 1e-6;
  settings.opt.f_tolerance = 1e-8;
  return settings;
}

}  // namespace

TEST_CASE("fcidump parsing of a core-energy-only file") {
  TempDir dir;
  const fs::path path = dir.path / "core_only.fcidump";
  {
    std::ofstream out(path);
    out << "&FCI NORB=2,NELEC=2,MS2=0,\n ORBSYM=1,1,\n ISYM=1,\n&END\n";
    out << "3.7 0 0 0 0\n";
  }
  const FcidumpData data = parse_fcidump(path);
  CHECK(data.integrals.n_orbitals() == 2);
  CHECK(data.n_electrons == 2);
  CHECK(data.integrals.e_core() == doctest::Approx(3.7));
  CHECK(data.integrals.one_body(0, 0) == 0.0);
  CHECK(data.integrals.two_body(1, 1, 1, 1) == 0.0);
}

TEST_CASE("fcidump hubbard file reaches the oracle through the full chain") {
  TempDir dir;
  const fs::path path = dir.path / "hubbard.fcidump";
  {
    std::ofstream out(path);
    out << "&FCI NORB=2,NELEC=2,MS2=0,\n ORBSYM=1,1,\n ISYM=1,\n&END\n";
    out << "-1.0 1 2 0 0\n";
    out << "2.0 1 1 1 1\n";
    out << "2.0 2 2 2 2\n";
  }
  const FcidumpData data = parse_fcidump(path);
  // Symmetry completion fills h1(2,1) from the single listed entry.
  CHECK(data.integrals.one_body(1, 0) == doctest::Approx(-1.0));
  const auto states = exact_casci(data.integrals, data.sector(), 1);
  CHECK(states[0].energy == doctest::Approx(1.0 - std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("fcidump write/parse round trip") {
  TempDir dir;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    FcidumpData data;
    data.integrals = random_integrals(rng);
    data.n_electrons = 2;
    data.ms2 = 0;
    const fs::path path = dir.path / ("round_" + std::to_string(trial) + ".fcidump");
    write_fcidump(data, path);
    const FcidumpData back = parse_fcidump(path);
    CHECK(back.n_electrons == 2);
    CHECK(std::abs(back.integrals.e_core() - data.integrals.e_core()) < 1e-12);
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) {
        CHECK(std::abs(back.integrals.one_body(p, q) - data.integrals.one_body(p, q)) < 1e-12);
        for (int r = 0; r < 2; ++r)
          for (int s = 0; s < 2; ++s)
            CHECK(std::abs(back.integrals.two_body(p, q, r, s) -
                           data.integrals.two_body(p, q, r, s)) < 1e-12);
      }
  }
}

TEST_CASE("fcidump parse errors carry line numbers") {
  TempDir dir;
  const fs::path missing = dir.path / "nope.fcidump";
  CHECK_THROWS_AS(parse_fcidump(missing), ParseError);

  const fs::path bad_index = dir.path / "bad_index.fcidump";
  {
    std::ofstream out(bad_index);
    out << "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n";
    out << "1.0 3 1 0 0\n";
  }
  CHECK_THROWS_AS(parse_fcidump(bad_index), ParseError);

  const fs::path bad_value = dir.path / "bad_value.fcidump";
  {
    std::ofstream out(bad_value);
    out << "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n";
    out << "abc 1 1 0 0\n";
  }
  try {
    parse_fcidump(bad_value);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }

  const fs::path no_header = dir.path / "no_header.fcidump";
  {
    std::ofstream out(no_header);
    out << "1.0 1 1 0 0\n";
  }
  CHECK_THROWS_AS(parse_fcidump(no_header), ParseError);
}

TEST_CASE("rdm export round trip with sparsity") {
  TempDir dir;
  const SectorSpec sector = cas22_sector();
  const AnsatzKind kind = AnsatzKind::spin_restricted();
  RDMPair rdms = measure_rdms({{0.0, M_PI}}, kind, Backend::statevector(), sector);
  rdms.weights = {1.0};

  const fs::path path = dir.path / "rdms.txt";
  write_rdms(rdms, path);

  // The HF 1-RDM has exactly one nonzero entry; sub-threshold values are
  // omitted from the file and restored as zeros.
  int one_rdm_lines = 0;
  {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line))
      if (line.rfind("1rdm", 0) == 0) ++one_rdm_lines;
  }
  CHECK(one_rdm_lines == 1);

  const RDMPair back = read_rdms(path);
  CHECK(back.n_orbitals == 2);
  REQUIRE(back.weights.size() == 1);
  CHECK((back.one_rdm - rdms.one_rdm).cwiseAbs().maxCoeff() < 1e-12);
  for (std::size_t i = 0; i < rdms.two_rdm.size(); ++i)
    CHECK(std::abs(back.two_rdm[i] - rdms.two_rdm[i]) < 1e-12);
}

TEST_CASE("single-iteration casci mode") {
  TempDir dir;
  const fs::path fcid = dir.path / "hubbard.fcidump";
  write_fcidump(hubbard_data(), fcid);

  CasscfConfig cfg;
  cfg.weights = {0.5, 0.5};
  const auto records = run_sa_casscf(fcid, 2, cfg, fast_settings(), dir.path);
  REQUIRE(records.size() == 1);
  CHECK(records[0].state_energies.size() == 2);
  CHECK(std::abs(records[0].state_energies[0] - (1.0 - std::sqrt(5.0))) < 1e-4);
  CHECK(std::abs(records[0].state_energies[1] - 2.0) < 1e-3);
  CHECK(records[0].averaged_energy ==
        doctest::Approx(0.5 * records[0].state_energies[0] + 0.5 * records[0].state_energies[1])
            .epsilon(1e-12));
  CHECK(!records[0].converged);
}

TEST_CASE("identity orbital update converges at the second iteration") {
  TempDir dir;
  const fs::path fcid = dir.path / "hubbard.fcidump";
  write_fcidump(hubbard_data(), fcid);

  CasscfConfig cfg;
  cfg.weights = {0.5, 0.5};
  cfg.external_command = "cp {fcidump} {out}";
  const auto records = run_sa_casscf(fcid, 2, cfg, fast_settings(), dir.path);
  REQUIRE(records.size() == 2);
  CHECK(records[1].converged);
  CHECK(std::abs(records[1].energy_change) < 1e-10);

  // The exported RDM file from iteration 0 exists and reads back.
  const RDMPair averaged = read_rdms(dir.path / "rdm_0.txt");
  CHECK(averaged.one_rdm.trace() == doctest::Approx(2.0).epsilon(1e-6));
  REQUIRE(averaged.weights.size() == 2);
}

TEST_CASE("macro-iteration budget exhaustion is flagged") {
  TempDir dir;
  const fs::path fcid = dir.path / "hubbard.fcidump";
  write_fcidump(hubbard_data(), fcid);

  CasscfConfig cfg;
  cfg.weights = {1.0};
  cfg.max_macro_iterations = 1;
  cfg.external_command = "cp {fcidump} {out}";
  const auto records = run_sa_casscf(fcid, 1, cfg, fast_settings(), dir.path);
  REQUIRE(records.size() == 1);
  CHECK(!records.back().converged);
}

TEST_CASE("failing or silent external commands abort") {
  TempDir dir;
  const fs::path fcid = dir.path / "hubbard.fcidump";
  write_fcidump(hubbard_data(), fcid);

  CasscfConfig cfg;
  cfg.weights = {1.0};
  cfg.external_command = "false";
  CHECK_THROWS_AS(run_sa_casscf(fcid, 1, cfg, fast_settings(), dir.path), ExternalCommandError);

  // Exit 0 but the named output path never appears.
  cfg.external_command = "true {out}";
  CHECK_THROWS_AS(run_sa_casscf(fcid, 1, cfg, fast_settings(), dir.path), ExternalCommandError);
}

TEST_CASE("per-state energies match their own rdm contraction") {
  TempDir dir;
  const fs::path fcid = dir.path / "hubbard.fcidump";
  const FcidumpData data = hubbard_data();
  write_fcidump(data, fcid);

  // Re-run the CI side by hand and compare: record energies must equal
  // Tr(h1 gamma) + 1/2 Gamma.g + e_core from that state's own RDMs.
  const SolverSettings settings = fast_settings();
  const SectorSpec sector = data.sector();
  const QubitOperator h = map_parity_reduced(build_hamiltonian(data.integrals), sector);
  const QubitOperator s2 = map_parity_reduced(build_s2_operator(2), sector);

  const SolveResult g = vqe(h, settings.kind, settings.backend, settings.opt, &s2);
  const RDMPair g_rdms = measure_rdms(g.theta_star, settings.kind, settings.backend, sector);
  CHECK(rdm_energy(g_rdms, data.integrals) == doctest::Approx(g.energy).epsilon(1e-6));

  const SolveResult e =
      vqe_ac(h, settings.kind, settings.backend, settings.opt, {g.theta_star}, 1e-4, &s2);
  const RDMPair e_rdms = measure_rdms(e.theta_star, settings.kind, settings.backend, sector);
  CHECK(rdm_energy(e_rdms, data.integrals) == doctest::Approx(e.energy).epsilon(1e-6));
}

TEST_CASE("state-specific weights reproduce a plain vqe result") {
  TempDir dir;
  const fs::path fcid = dir.path / "hubbard.fcidump";
  const FcidumpData data = hubbard_data();
  write_fcidump(data, fcid);

  CasscfConfig cfg;
  cfg.weights = {1.0};
  const SolverSettings settings = fast_settings();
  const auto records = run_sa_casscf(fcid, 1, cfg, settings, dir.path);

  const QubitOperator h = map_parity_reduced(build_hamiltonian(data.integrals), data.sector());
  const QubitOperator s2 = map_parity_reduced(build_s2_operator(2), data.sector());
  const SolveResult direct = vqe(h, settings.kind, settings.backend, settings.opt, &s2);
  CHECK(records[0].state_energies[0] == doctest::Approx(direct.energy).epsilon(1e-12));
  CHECK(records[0].averaged_energy == doctest::Approx(direct.energy).epsilon(1e-12));
}

TEST_CASE("casscf config validation") {
  CasscfConfig bad;
  bad.weights = {0.7, 0.7};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.weights = {1.0};
  bad.energy_threshold = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
