#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "vqcas/sim.hpp"

namespace vqcas {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Stream seed from the model seed and the circuit content, so distinct
// circuits draw decorrelated but reproducible randomness.
std::uint64_t stream_seed(const NoiseModel& nm, const Circuit& a, const Circuit& b) {
  std::uint64_t h = splitmix64(nm.seed ^ 0x5bf03635ull);
  auto fold = [&h](std::uint64_t v) { h = splitmix64(h ^ v); };
  for (const Circuit* c : {&a, &b}) {
    fold(static_cast<std::uint64_t>(c->n_qubits));
    for (const Gate& g : c->gates) {
      fold(static_cast<std::uint64_t>(g.kind));
      fold(static_cast<std::uint64_t>(g.target + 1));
      fold(static_cast<std::uint64_t>(g.control + 2));
      fold(std::bit_cast<std::uint64_t>(g.angle));
    }
  }
  return h;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

long Counts::at(const std::string& bits) const {
  auto it = table.find(bits);
  return it == table.end() ? 0 : it->second;
}

std::vector<double> Counts::frequencies() const {
  const long dim = 1L << n_qubits;
  std::vector<double> freq(static_cast<std::size_t>(dim), 0.0);
  for (const auto& [bits, count] : table)
    freq[static_cast<std::size_t>(index_of_bitstring(bits))] =
        static_cast<double>(count) / static_cast<double>(total);
  return freq;
}

Counts sample_counts(const Circuit& c, const Circuit& basis_changes, const NoiseModel& nm) {
  if (!basis_changes.single_qubit_only())
    throw std::invalid_argument("sample_counts: basis changes must be single-qubit gates");
  nm.validate();

  Circuit full = c;
  full.append(basis_changes);
  const DensityMatrix rho = run_density(full, nm);

  const long dim = rho.entries.rows();
  std::vector<double> probs(static_cast<std::size_t>(dim));
  double norm = 0.0;
  for (long i = 0; i < dim; ++i) {
    probs[static_cast<std::size_t>(i)] = std::max(0.0, rho.entries(i, i).real());
    norm += probs[static_cast<std::size_t>(i)];
  }
  for (double& p : probs) p /= norm;

  std::mt19937_64 rng(stream_seed(nm, c, basis_changes));
  const int n = c.n_qubits;

  Counts counts;
  counts.n_qubits = n;
  counts.total = nm.shots;
  for (int shot = 0; shot < nm.shots; ++shot) {
    // Ideal outcome from the diagonal.
    double u = uniform01(rng);
    long outcome = dim - 1;
    for (long i = 0; i < dim; ++i) {
      u -= probs[static_cast<std::size_t>(i)];
      if (u < 0) {
        outcome = i;
        break;
      }
    }
    // Readout confusion, one independent flip draw per qubit.
    long measured = 0;
    for (int q = 0; q < n; ++q) {
      const int truth = (outcome >> q) & 1;
      const double p_one = nm.readout_for(q)(1, truth);
      if (uniform01(rng) < p_one) measured |= (1L << q);
    }
    ++counts.table[bitstring_of(measured, n)];
  }
  return counts;
}

Eigen::MatrixXd readout_calibrate(const NoiseModel& nm, int n_qubits) {
  if (n_qubits < 1 || n_qubits > 10)
    throw std::invalid_argument("readout_calibrate: unsupported register size");
  const long dim = 1L << n_qubits;
  Eigen::MatrixXd calibration(dim, dim);
  const Circuit empty(n_qubits);
  for (long prepared = 0; prepared < dim; ++prepared) {
    Circuit prep(n_qubits);
    for (int q = 0; q < n_qubits; ++q)
      if ((prepared >> q) & 1) prep.x(q);
    const Counts counts = sample_counts(prep, empty, nm);
    const std::vector<double> freq = counts.frequencies();
    for (long i = 0; i < dim; ++i) calibration(i, prepared) = freq[static_cast<std::size_t>(i)];
  }
  return calibration;
}

namespace {

// Measurement-basis compatibility: a term fits a group whose basis word
// agrees with the term's non-identity letters; 'I' slots are free.
bool compatible(const std::string& basis, const std::string& word) {
  for (std::size_t q = 0; q < word.size(); ++q) {
    if (word[q] == 'I') continue;
    if (basis[q] != 'I' && basis[q] != word[q]) return false;
  }
  return true;
}

void merge_into(std::string& basis, const std::string& word) {
  for (std::size_t q = 0; q < word.size(); ++q)
    if (word[q] != 'I') basis[q] = word[q];
}

Circuit basis_change_circuit(const std::string& basis, int n_qubits) {
  Circuit changes(n_qubits);
  for (int q = 0; q < n_qubits; ++q) {
    const char letter = basis[static_cast<std::size_t>(q)];
    if (letter == 'X') {
      changes.h(q);
    } else if (letter == 'Y') {
      changes.sdg(q);
      changes.h(q);
    }
  }
  return changes;
}

double parity_expectation(const std::vector<double>& probs, long support_mask) {
  double value = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const int parity = std::popcount(static_cast<std::uint64_t>(static_cast<long>(i) & support_mask)) & 1;
    value += parity ? -probs[i] : probs[i];
  }
  return value;
}

}  // namespace

EstimateResult estimate_expectation(const Circuit& c, const QubitOperator& op,
                                    const NoiseModel& nm, bool mitigated,
                                    const Eigen::MatrixXd* calibration) {
  if (op.n_qubits() != c.n_qubits)
    throw std::invalid_argument("estimate_expectation: register size mismatch");
  if (!op.is_hermitian(1e-12))
    throw std::invalid_argument("estimate_expectation: operator is not Hermitian");

  EstimateResult result;
  const std::string identity_word(static_cast<std::size_t>(op.n_qubits()), 'I');

  // Greedy grouping of terms into joint measurement bases.
  std::vector<std::string> bases;
  std::vector<std::vector<PauliTerm>> groups;
  for (const PauliTerm& term : op.terms()) {
    if (term.word == identity_word) {
      result.value += term.coefficient.real();  // exact, zero variance
      continue;
    }
    bool placed = false;
    for (std::size_t g = 0; g < bases.size(); ++g) {
      if (compatible(bases[g], term.word)) {
        merge_into(bases[g], term.word);
        groups[g].push_back(term);
        placed = true;
        break;
      }
    }
    if (!placed) {
      std::string basis = identity_word;
      merge_into(basis, term.word);
      bases.push_back(std::move(basis));
      groups.push_back({term});
    }
  }

  Eigen::MatrixXd local_calibration;
  if (mitigated && calibration == nullptr) {
    local_calibration = readout_calibrate(nm, c.n_qubits);
    calibration = &local_calibration;
  }

  double variance = 0.0;
  for (std::size_t g = 0; g < bases.size(); ++g) {
    const Counts counts = sample_counts(c, basis_change_circuit(bases[g], c.n_qubits), nm);
    const std::vector<double> probs =
        mitigated ? mitigate_counts(counts, *calibration) : counts.frequencies();
    for (const PauliTerm& term : groups[g]) {
      long support = 0;
      for (std::size_t q = 0; q < term.word.size(); ++q)
        if (term.word[q] != 'I') support |= (1L << q);
      const double s = parity_expectation(probs, support);
      result.value += term.coefficient.real() * s;
      variance += std::norm(term.coefficient) * std::max(0.0, 1.0 - s * s) /
                  static_cast<double>(nm.shots);
    }
  }
  result.std_error = std::sqrt(variance);
  return result;
}

}  // namespace vqcas
