#include <cmath>

#include "vqcas/circuit.hpp"
#include "vqcas/qop.hpp"

#include "gate_kernels.hpp"

namespace vqcas {

Circuit& Circuit::x(int q) {
  gates.push_back({GateKind::PauliX, q});
  return *this;
}
Circuit& Circuit::ry(int q, double angle) {
  gates.push_back({GateKind::Ry, q, -1, angle});
  return *this;
}
Circuit& Circuit::rz(int q, double angle) {
  gates.push_back({GateKind::Rz, q, -1, angle});
  return *this;
}
Circuit& Circuit::h(int q) {
  gates.push_back({GateKind::Hadamard, q});
  return *this;
}
Circuit& Circuit::sdg(int q) {
  gates.push_back({GateKind::SDagger, q});
  return *this;
}
Circuit& Circuit::cnot(int control, int target) {
  gates.push_back({GateKind::Cnot, target, control});
  return *this;
}

void Circuit::append(const Circuit& other) {
  if (other.n_qubits != n_qubits) throw std::invalid_argument("append: register size mismatch");
  gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

Circuit Circuit::inverse() const {
  Circuit inv(n_qubits);
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
    Gate g = *it;
    switch (g.kind) {
      case GateKind::Ry:
      case GateKind::Rz:
        g.angle = -g.angle;
        break;
      case GateKind::SDagger:
        // S = Rz(pi/2) up to a global phase.
        g.kind = GateKind::Rz;
        g.angle = M_PI / 2;
        break;
      default:
        break;  // X, H, Cnot are involutions
    }
    inv.gates.push_back(g);
  }
  return inv;
}

bool Circuit::single_qubit_only() const {
  for (const Gate& g : gates)
    if (g.kind == GateKind::Cnot) return false;
  return true;
}

void Circuit::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("circuit: empty register");
  for (const Gate& g : gates) {
    if (g.target < 0 || g.target >= n_qubits)
      throw std::invalid_argument("circuit: qubit index out of range");
    if (g.kind == GateKind::Cnot) {
      if (g.control < 0 || g.control >= n_qubits)
        throw std::invalid_argument("circuit: control index out of range");
      if (g.control == g.target) throw std::invalid_argument("circuit: control equals target");
    }
  }
}

int Statevector::n_qubits() const {
  long dim = amplitudes.size();
  int n = 0;
  while ((1L << n) < dim) ++n;
  return n;
}

void Statevector::validate() const {
  const long dim = amplitudes.size();
  if (dim < 2 || (dim & (dim - 1)) != 0)
    throw std::invalid_argument("statevector: dimension is not a power of two");
  if (std::abs(amplitudes.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("statevector: not normalized");
}

Statevector Statevector::zero_state(int n_qubits) {
  Statevector s;
  s.amplitudes = Eigen::VectorXcd::Zero(1L << n_qubits);
  s.amplitudes[0] = 1.0;
  return s;
}

Statevector Statevector::from_amplitudes(Eigen::VectorXcd amps) {
  Statevector s;
  s.amplitudes = std::move(amps);
  s.validate();
  return s;
}

double overlap_probability(const Statevector& a, const Statevector& b) {
  if (a.amplitudes.size() != b.amplitudes.size())
    throw std::invalid_argument("overlap: dimension mismatch");
  return std::norm(a.amplitudes.dot(b.amplitudes));
}

bool equal_up_to_phase(const Statevector& a, const Statevector& b, double tol) {
  return std::abs(overlap_probability(a, b) - 1.0) <= 2 * tol;
}

std::string bitstring_of(long index, int n_qubits) {
  std::string bits(static_cast<std::size_t>(n_qubits), '0');
  for (int q = 0; q < n_qubits; ++q)
    if ((index >> q) & 1) bits[static_cast<std::size_t>(n_qubits - 1 - q)] = '1';
  return bits;
}

long index_of_bitstring(const std::string& bits) {
  long index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("bitstring: invalid character");
    index = (index << 1) | (c == '1');
  }
  return index;
}

namespace {

void apply_single_qubit(Eigen::VectorXcd& amps, int q, const Eigen::Matrix2cd& u) {
  const long dim = amps.size();
  const long stride = 1L << q;
  for (long base = 0; base < dim; base += 2 * stride) {
    for (long low = 0; low < stride; ++low) {
      const long i0 = base + low;
      const long i1 = i0 + stride;
      const complexd a0 = amps[i0];
      const complexd a1 = amps[i1];
      amps[i0] = u(0, 0) * a0 + u(0, 1) * a1;
      amps[i1] = u(1, 0) * a0 + u(1, 1) * a1;
    }
  }
}

void apply_cnot(Eigen::VectorXcd& amps, int control, int target) {
  const long dim = amps.size();
  const long cbit = 1L << control;
  const long tbit = 1L << target;
  for (long i = 0; i < dim; ++i) {
    if ((i & cbit) && !(i & tbit)) std::swap(amps[i], amps[i | tbit]);
  }
}

}  // namespace

Eigen::Matrix2cd single_qubit_unitary(const Gate& g) {
  Eigen::Matrix2cd u;
  switch (g.kind) {
    case GateKind::PauliX:
      u << 0, 1, 1, 0;
      break;
    case GateKind::Ry: {
      const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
      u << c, -s, s, c;
      break;
    }
    case GateKind::Rz: {
      const complexd e = std::exp(complexd(0, -g.angle / 2));
      u << e, 0, 0, std::conj(e);
      break;
    }
    case GateKind::Hadamard: {
      const double r = 1.0 / std::sqrt(2.0);
      u << r, r, r, -r;
      break;
    }
    case GateKind::SDagger:
      u << 1, 0, 0, complexd(0, -1);
      break;
    default:
      throw std::invalid_argument("not a single-qubit gate");
  }
  return u;
}

void apply_gate(Eigen::VectorXcd& amps, const Gate& g) {
  if (g.kind == GateKind::Cnot)
    apply_cnot(amps, g.control, g.target);
  else
    apply_single_qubit(amps, g.target, single_qubit_unitary(g));
}

Statevector run_statevector(const Circuit& c) {
  c.validate();
  Statevector state = Statevector::zero_state(c.n_qubits);
  for (const Gate& g : c.gates) apply_gate(state.amplitudes, g);
  return state;
}

namespace {

// P |psi> for one Pauli word, via bit arithmetic.
Eigen::VectorXcd apply_pauli_word(const std::string& word, const Eigen::VectorXcd& v) {
  const long dim = v.size();
  Eigen::VectorXcd out(dim);
  long flip = 0;
  for (std::size_t q = 0; q < word.size(); ++q)
    if (word[q] == 'X' || word[q] == 'Y') flip |= (1L << q);
  for (long i = 0; i < dim; ++i) {
    complexd amp = v[i];
    for (std::size_t q = 0; q < word.size(); ++q) {
      const int bit = (i >> q) & 1;
      if (word[q] == 'Y') amp *= bit ? complexd(0, -1) : complexd(0, 1);
      if (word[q] == 'Z' && bit) amp = -amp;
    }
    out[i ^ flip] = amp;
  }
  return out;
}

}  // namespace

double expectation(const Statevector& state, const QubitOperator& op) {
  if ((1L << op.n_qubits()) != state.amplitudes.size())
    throw std::invalid_argument("expectation: register size mismatch");
  if (!op.is_hermitian(1e-12))
    throw std::invalid_argument("expectation: operator is not Hermitian");
  complexd total = 0.0;
  for (const PauliTerm& term : op.terms()) {
    total += term.coefficient * state.amplitudes.dot(apply_pauli_word(term.word, state.amplitudes));
  }
  return total.real();
}

}  // namespace vqcas
