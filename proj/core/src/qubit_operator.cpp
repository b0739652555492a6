#include <cmath>
#include <sstream>

#include "vqcas/qop.hpp"

namespace vqcas {

QubitOperator::QubitOperator(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("QubitOperator: register must be positive");
}

QubitOperator QubitOperator::identity(int n_qubits, complexd coefficient) {
  QubitOperator op(n_qubits);
  op.add_term(coefficient, std::string(static_cast<std::size_t>(n_qubits), 'I'));
  return op;
}

void QubitOperator::validate_word(std::string_view word) const {
  if (static_cast<int>(word.size()) != n_qubits_)
    throw std::invalid_argument("QubitOperator: word length != register size");
  for (char c : word)
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
      throw std::invalid_argument("QubitOperator: invalid Pauli letter");
}

void QubitOperator::add_term(complexd coefficient, std::string_view word) {
  validate_word(word);
  auto key = std::string(word);
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    if (std::abs(coefficient) >= kCoefficientCutoff) terms_.emplace(std::move(key), coefficient);
    return;
  }
  it->second += coefficient;
  if (std::abs(it->second) < kCoefficientCutoff) terms_.erase(it);
}

QubitOperator& QubitOperator::operator+=(const QubitOperator& other) {
  if (n_qubits_ == 0) n_qubits_ = other.n_qubits_;
  if (other.n_qubits_ != n_qubits_)
    throw std::invalid_argument("QubitOperator: register size mismatch");
  for (const auto& [word, coeff] : other.terms_) add_term(coeff, word);
  return *this;
}

QubitOperator& QubitOperator::operator*=(complexd scale) {
  if (std::abs(scale) < kCoefficientCutoff) {
    terms_.clear();
    return *this;
  }
  for (auto& [word, coeff] : terms_) coeff *= scale;
  return *this;
}

std::vector<PauliTerm> QubitOperator::terms() const {
  std::vector<PauliTerm> out;
  out.reserve(terms_.size());
  for (const auto& [word, coeff] : terms_) out.push_back(PauliTerm{coeff, word});
  return out;
}

complexd QubitOperator::coefficient(std::string_view word) const {
  auto it = terms_.find(std::string(word));
  return it == terms_.end() ? complexd{0.0, 0.0} : it->second;
}

bool QubitOperator::is_hermitian(double tol) const {
  for (const auto& [word, coeff] : terms_)
    if (std::abs(coeff.imag()) > tol) return false;
  return true;
}

std::string QubitOperator::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [word, coeff] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << coeff.real();
    if (coeff.imag() != 0.0) os << (coeff.imag() > 0 ? "+" : "") << coeff.imag() << "i";
    os << ")*" << word;
  }
  if (first) os << "0";
  return os.str();
}

Eigen::MatrixXcd matrix_of(const QubitOperator& op) {
  const int n = op.n_qubits();
  if (n < 1) throw std::invalid_argument("matrix_of: empty operator");
  if (n > 12) throw UnsupportedSizeError("matrix_of: register larger than 12 qubits");
  const long dim = 1L << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const PauliTerm& term : op.terms()) {
    for (long col = 0; col < dim; ++col) {
      long row = col;
      complexd amp = term.coefficient;
      for (int q = 0; q < n; ++q) {
        const int bit = (col >> q) & 1;
        switch (term.word[static_cast<std::size_t>(q)]) {
          case 'I':
            break;
          case 'X':
            row ^= (1L << q);
            break;
          case 'Y':
            row ^= (1L << q);
            amp *= bit ? complexd(0, -1) : complexd(0, 1);
            break;
          case 'Z':
            if (bit) amp = -amp;
            break;
        }
      }
      m(row, col) += amp;
    }
  }
  return m;
}

}  // namespace vqcas
