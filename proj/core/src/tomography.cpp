#include <bit>
#include <cmath>

#include "vqcas/sim.hpp"

namespace vqcas {

DensityMatrix tomography(const Circuit& c, const NoiseModel& nm) {
  if (c.n_qubits != 2)
    throw UnsupportedSizeError("tomography: only two-qubit registers are supported");

  const Eigen::MatrixXd calibration = readout_calibrate(nm, 2);

  // Nine measurement settings cover all fifteen non-identity words; a
  // word estimate averages over every setting that contains it.
  static const char kLetters[3] = {'X', 'Y', 'Z'};
  std::map<std::string, std::pair<double, int>> estimates;
  for (char g1 : kLetters) {
    for (char g0 : kLetters) {
      const std::string basis = {g0, g1};
      Circuit changes(2);
      for (int q = 0; q < 2; ++q) {
        const char letter = basis[static_cast<std::size_t>(q)];
        if (letter == 'X') changes.h(q);
        if (letter == 'Y') {
          changes.sdg(q);
          changes.h(q);
        }
      }
      const Counts counts = sample_counts(c, changes, nm);
      const std::vector<double> p = mitigate_counts(counts, calibration);
      for (int use1 : {0, 1}) {
        for (int use0 : {0, 1}) {
          if (!use0 && !use1) continue;
          const std::string word = {use0 ? g0 : 'I', use1 ? g1 : 'I'};
          const unsigned support = (use0 ? 1u : 0u) | (use1 ? 2u : 0u);
          double value = 0.0;
          for (std::size_t i = 0; i < p.size(); ++i) {
            const int parity = std::popcount(static_cast<unsigned>(i) & support) & 1;
            value += parity ? -p[i] : p[i];
          }
          estimates[word].first += value;
          estimates[word].second += 1;
        }
      }
    }
  }

  QubitOperator reconstruction = QubitOperator::identity(2, 0.25);
  for (const auto& [word, acc] : estimates)
    reconstruction.add_term(0.25 * acc.first / acc.second, word);

  Eigen::MatrixXcd rho = matrix_of(reconstruction);
  rho = 0.5 * (rho + rho.adjoint().eval());

  // Nearest trace-1 PSD matrix by eigenvalue clipping.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho);
  Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  lambda /= lambda.sum();
  DensityMatrix out;
  out.entries = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().adjoint();
  return out;
}

Purified purify(const DensityMatrix& rho) {
  rho.validate();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho.entries);
  const long dim = rho.entries.rows();
  const long top = dim - 1;  // eigenvalues ascend

  Purified out;
  out.weight = eig.eigenvalues()(top);
  out.degenerate = (top > 0) && (out.weight - eig.eigenvalues()(top - 1) < 1e-9);

  Eigen::VectorXcd psi = eig.eigenvectors().col(top);
  long anchor = 0;
  psi.cwiseAbs().maxCoeff(&anchor);
  const complexd phase = psi[anchor] / std::abs(psi[anchor]);
  psi /= phase;
  out.psi = Statevector::from_amplitudes(psi / psi.norm());
  return out;
}

RefitResult refit_parameters(const AnsatzKind& kind, const Statevector& target,
                             const AnsatzParameters& start) {
  if ((1 << kind.n_qubits) != target.amplitudes.size())
    throw std::invalid_argument("refit_parameters: register mismatch");
  if (static_cast<int>(start.values.size()) != parameter_count(kind))
    throw std::invalid_argument("refit_parameters: parameter length mismatch");

  const ObjectiveFn infidelity = [&](std::span<const double> theta) {
    AnsatzParameters p{std::vector<double>(theta.begin(), theta.end())};
    return 1.0 - overlap_probability(target, run_statevector(build(kind, p)));
  };

  OptimizerConfig cfg;
  cfg.rho_begin = 0.3;
  cfg.rho_end = 1e-8;
  cfg.max_evaluations = 500;
  cfg.f_tolerance = 1e-12;
  const OptResult opt = minimize(infidelity, {}, start.values, cfg);

  RefitResult out;
  out.params.values = opt.x_best;
  out.fidelity = 1.0 - opt.f_best;
  out.poor_fit = out.fidelity < 0.5;
  return out;
}

}  // namespace vqcas
