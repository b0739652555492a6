#include <benchmark/benchmark.h>

#include <cmath>

#include "vqcas/chem.hpp"
#include "vqcas/solve.hpp"

namespace {

using namespace vqcas;

ActiveSpaceIntegrals hubbard() {
  ActiveSpaceIntegrals ints(2, 0.0);
  ints.set_one_body(0, 1, -1.0);
  ints.set_two_body(0, 0, 0, 0, 2.0);
  ints.set_two_body(1, 1, 1, 1, 2.0);
  return ints;
}

const SectorSpec kSector{2, 0};

void BM_BuildAndMapHamiltonian(benchmark::State& state) {
  const ActiveSpaceIntegrals ints = hubbard();
  for (auto _ : state) {
    benchmark::DoNotOptimize(map_parity_reduced(build_hamiltonian(ints), kSector));
  }
}
BENCHMARK(BM_BuildAndMapHamiltonian);

void BM_SpinRestrictedStatevector(benchmark::State& state) {
  const AnsatzKind kind = AnsatzKind::spin_restricted();
  const Circuit c = build(kind, {{0.7, 2.1}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_statevector(c));
  }
}
BENCHMARK(BM_SpinRestrictedStatevector);

void BM_NoisyDensitySimulation(benchmark::State& state) {
  const Circuit c = build(AnsatzKind::real_amplitudes(6),
                          initial_parameters(AnsatzKind::real_amplitudes(6)));
  const NoiseModel nm = NoiseModel::default_synthetic(2, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_density(c, nm));
  }
}
BENCHMARK(BM_NoisyDensitySimulation);

void BM_SampleCounts(benchmark::State& state) {
  const Circuit c = build(AnsatzKind::spin_restricted(), {{0.7, 2.1}});
  NoiseModel nm = NoiseModel::default_synthetic(2, 1);
  nm.shots = static_cast<int>(state.range(0));
  const Circuit empty(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_counts(c, empty, nm));
  }
}
BENCHMARK(BM_SampleCounts)->Arg(1024)->Arg(8192)->Arg(32768);

void BM_EstimateExpectation(benchmark::State& state) {
  const QubitOperator h = map_parity_reduced(build_hamiltonian(hubbard()), kSector);
  const Circuit c = build(AnsatzKind::spin_restricted(), {{0.7, 2.1}});
  const NoiseModel nm = NoiseModel::default_synthetic(2, 1);
  const Eigen::MatrixXd calibration = readout_calibrate(nm, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_expectation(c, h, nm, true, &calibration));
  }
}
BENCHMARK(BM_EstimateExpectation);

void BM_Tomography(benchmark::State& state) {
  const Circuit c = build(AnsatzKind::spin_restricted(), {{0.7, 2.1}});
  const NoiseModel nm = NoiseModel::default_synthetic(2, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tomography(c, nm));
  }
}
BENCHMARK(BM_Tomography);

void BM_ExactCasci(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ActiveSpaceIntegrals ints(n, 0.0);
  for (int p = 0; p < n; ++p) {
    ints.set_one_body(p, p, -1.0 + 0.1 * p);
    if (p + 1 < n) ints.set_one_body(p, p + 1, -0.5);
    ints.set_two_body(p, p, p, p, 1.0);
  }
  const SectorSpec sector{n, 0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_casci(ints, sector, 2));
  }
}
BENCHMARK(BM_ExactCasci)->Arg(2)->Arg(4)->Arg(6);

void BM_VqeStatevector(benchmark::State& state) {
  const QubitOperator h = map_parity_reduced(build_hamiltonian(hubbard()), kSector);
  OptimizerConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        vqe(h, AnsatzKind::spin_restricted(), Backend::statevector(), cfg));
  }
}
BENCHMARK(BM_VqeStatevector);

void BM_CobylaDisk(benchmark::State& state) {
  const ObjectiveFn objective = [](std::span<const double> x) { return x[0] + x[1]; };
  const std::vector<ObjectiveFn> constraints = {
      [](std::span<const double> x) { return 1.0 - x[0] * x[0] - x[1] * x[1]; }};
  OptimizerConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(minimize(objective, constraints, {0.0, 0.0}, cfg));
  }
}
BENCHMARK(BM_CobylaDisk);

}  // namespace

BENCHMARK_MAIN();
