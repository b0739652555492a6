#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "vqcas/sim.hpp"

#include "gate_kernels.hpp"

namespace vqcas {

Eigen::Matrix2d NoiseModel::readout_for(int q) const {
  if (q < 0) throw std::invalid_argument("readout_for: negative qubit");
  if (static_cast<std::size_t>(q) < readout.size()) return readout[static_cast<std::size_t>(q)];
  return Eigen::Matrix2d::Identity();
}

bool NoiseModel::ideal_readout() const {
  for (const Eigen::Matrix2d& m : readout)
    if (!m.isIdentity(1e-15)) return false;
  return true;
}

void NoiseModel::validate() const {
  if (p1 < 0 || p1 > 1 || p2 < 0 || p2 > 1)
    throw std::invalid_argument("noise model: depolarizing probability outside [0,1]");
  if (shots < 1) throw std::invalid_argument("noise model: shots must be positive");
  for (const Eigen::Matrix2d& m : readout) {
    for (int col = 0; col < 2; ++col) {
      if (std::abs(m.col(col).sum() - 1.0) > 1e-12)
        throw std::invalid_argument("noise model: confusion columns must sum to 1");
      if (m(0, col) < 0 || m(1, col) < 0)
        throw std::invalid_argument("noise model: negative confusion entry");
    }
  }
}

NoiseModel NoiseModel::default_synthetic(int n_qubits, std::uint64_t seed) {
  NoiseModel nm;
  nm.p1 = 1e-3;
  nm.p2 = 1e-2;
  Eigen::Matrix2d confusion;
  confusion << 0.975, 0.025, 0.025, 0.975;
  nm.readout.assign(static_cast<std::size_t>(n_qubits), confusion);
  nm.shots = 8192;
  nm.seed = seed;
  return nm;
}

NoiseModel NoiseModel::noiseless() { return NoiseModel{}; }

NoiseModel NoiseModel::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("noise config: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("noise config: ") + e.what());
  }
  NoiseModel nm;
  nm.p1 = j.value("p1", 0.0);
  nm.p2 = j.value("p2", 0.0);
  nm.shots = j.value("shots", 8192);
  nm.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("readout")) {
    for (const auto& rows : j.at("readout")) {
      Eigen::Matrix2d m;
      m << rows.at(0).at(0).get<double>(), rows.at(0).at(1).get<double>(),
          rows.at(1).at(0).get<double>(), rows.at(1).at(1).get<double>();
      nm.readout.push_back(m);
    }
  }
  nm.validate();
  return nm;
}

int DensityMatrix::n_qubits() const {
  long dim = entries.rows();
  int n = 0;
  while ((1L << n) < dim) ++n;
  return n;
}

double DensityMatrix::purity() const { return (entries * entries).trace().real(); }

void DensityMatrix::validate() const {
  if (entries.rows() != entries.cols()) throw std::invalid_argument("density: not square");
  if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("density: not Hermitian");
  if (std::abs(entries.trace().real() - 1.0) > 1e-8 || std::abs(entries.trace().imag()) > 1e-8)
    throw std::invalid_argument("density: trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(entries);
  if (eig.eigenvalues().minCoeff() < -1e-6)
    throw std::invalid_argument("density: negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(const Statevector& psi) {
  DensityMatrix rho;
  rho.entries = psi.amplitudes * psi.amplitudes.adjoint();
  return rho;
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  const long dim = 1L << n_qubits;
  DensityMatrix rho;
  rho.entries = Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim);
  return rho;
}

namespace {

// rho -> U rho U^+ for a gate, reusing the statevector kernel on columns.
void conjugate_by_gate(Eigen::MatrixXcd& rho, const Gate& g) {
  const long dim = rho.rows();
  for (long col = 0; col < dim; ++col) {
    Eigen::VectorXcd v = rho.col(col);
    apply_gate(v, g);
    rho.col(col) = v;
  }
  Eigen::MatrixXcd adj = rho.adjoint();
  for (long col = 0; col < dim; ++col) {
    Eigen::VectorXcd v = adj.col(col);
    apply_gate(v, g);
    adj.col(col) = v;
  }
  rho = adj.adjoint();
}

// rho -> (1-p) rho + p Tr_q(rho) x I/2. In the q-block picture: entries
// off-diagonal in qubit q scale by (1-p); the two diagonal blocks mix
// toward their average.
void depolarize_qubit(Eigen::MatrixXcd& rho, int q, double p) {
  if (p == 0.0) return;
  const long dim = rho.rows();
  const long bit = 1L << q;
  for (long i = 0; i < dim; ++i) {
    if (i & bit) continue;
    for (long j = 0; j < dim; ++j) {
      if (j & bit) continue;
      const complexd avg = 0.5 * (rho(i, j) + rho(i | bit, j | bit));
      rho(i, j) = (1 - p) * rho(i, j) + p * avg;
      rho(i | bit, j | bit) = (1 - p) * rho(i | bit, j | bit) + p * avg;
      rho(i, j | bit) *= (1 - p);
      rho(i | bit, j) *= (1 - p);
    }
  }
}

}  // namespace

DensityMatrix run_density(const Circuit& c, const NoiseModel& nm) {
  c.validate();
  nm.validate();
  const long dim = 1L << c.n_qubits;
  DensityMatrix rho;
  rho.entries = Eigen::MatrixXcd::Zero(dim, dim);
  rho.entries(0, 0) = 1.0;
  for (const Gate& g : c.gates) {
    conjugate_by_gate(rho.entries, g);
    if (g.kind == GateKind::Cnot) {
      depolarize_qubit(rho.entries, g.control, nm.p2);
      depolarize_qubit(rho.entries, g.target, nm.p2);
    } else {
      depolarize_qubit(rho.entries, g.target, nm.p1);
    }
  }
  return rho;
}

double expectation(const DensityMatrix& state, const QubitOperator& op) {
  if ((1L << op.n_qubits()) != state.entries.rows())
    throw std::invalid_argument("expectation: register size mismatch");
  if (!op.is_hermitian(1e-12))
    throw std::invalid_argument("expectation: operator is not Hermitian");
  return (matrix_of(op) * state.entries).trace().real();
}

}  // namespace vqcas
