#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <sstream>

#include "vqcas/qop.hpp"

namespace vqcas {

void FermionOperator::add_term(double coefficient, std::vector<LadderOp> ops) {
  for (const LadderOp& op : ops) {
    if (op.index < 0) throw std::invalid_argument("negative spin-orbital index");
  }
  terms_.push_back(FermionTerm{coefficient, std::move(ops)});
}

FermionOperator& FermionOperator::operator+=(const FermionOperator& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

FermionOperator& FermionOperator::operator*=(double scale) {
  for (FermionTerm& t : terms_) t.coefficient *= scale;
  return *this;
}

FermionOperator FermionOperator::operator*(const FermionOperator& other) const {
  FermionOperator out;
  for (const FermionTerm& a : terms_) {
    for (const FermionTerm& b : other.terms_) {
      std::vector<LadderOp> ops = a.ops;
      ops.insert(ops.end(), b.ops.begin(), b.ops.end());
      out.add_term(a.coefficient * b.coefficient, std::move(ops));
    }
  }
  return out;
}

int FermionOperator::max_index() const {
  int m = -1;
  for (const FermionTerm& t : terms_)
    for (const LadderOp& op : t.ops) m = std::max(m, op.index);
  return m;
}

namespace {

// Position of the first adjacent pair violating the canonical order, or -1.
// Canonical: creations (ascending index) before annihilations (descending).
int first_violation(const std::vector<LadderOp>& ops) {
  for (std::size_t i = 0; i + 1 < ops.size(); ++i) {
    const LadderOp& a = ops[i];
    const LadderOp& b = ops[i + 1];
    if (!a.create && b.create) return static_cast<int>(i);
    if (a.create && b.create && a.index >= b.index) return static_cast<int>(i);
    if (!a.create && !b.create && a.index <= b.index) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

FermionOperator FermionOperator::normal_ordered() const {
  std::deque<FermionTerm> work(terms_.begin(), terms_.end());
  std::map<std::vector<LadderOp>, double> merged;

  while (!work.empty()) {
    FermionTerm term = std::move(work.front());
    work.pop_front();

    const int i = first_violation(term.ops);
    if (i < 0) {
      merged[term.ops] += term.coefficient;
      continue;
    }
    LadderOp a = term.ops[i];
    LadderOp b = term.ops[i + 1];
    if (a.create == b.create) {
      if (a.index == b.index) continue;  // a^+ a^+ or a a on the same mode vanishes
      std::swap(term.ops[i], term.ops[i + 1]);
      term.coefficient = -term.coefficient;
      work.push_back(std::move(term));
      continue;
    }
    // a_i a_j^+ = delta_ij - a_j^+ a_i
    if (a.index == b.index) {
      FermionTerm contracted{term.coefficient, {}};
      contracted.ops.reserve(term.ops.size() - 2);
      contracted.ops.insert(contracted.ops.end(), term.ops.begin(), term.ops.begin() + i);
      contracted.ops.insert(contracted.ops.end(), term.ops.begin() + i + 2, term.ops.end());
      work.push_back(std::move(contracted));
    }
    std::swap(term.ops[i], term.ops[i + 1]);
    term.coefficient = -term.coefficient;
    work.push_back(std::move(term));
  }

  FermionOperator out;
  for (auto& [ops, coeff] : merged) {
    if (std::abs(coeff) >= kCoefficientCutoff) out.add_term(coeff, ops);
  }
  return out;
}

bool FermionOperator::equals(const FermionOperator& other, double tol) const {
  FermionOperator diff = *this;
  FermionOperator negated = other;
  negated *= -1.0;
  diff += negated;
  for (const FermionTerm& t : diff.normal_ordered().terms()) {
    if (std::abs(t.coefficient) > tol) return false;
  }
  return true;
}

std::string FermionOperator::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const FermionTerm& t : terms_) {
    if (!first) os << " + ";
    first = false;
    os << t.coefficient;
    for (const LadderOp& op : t.ops) os << " a" << (op.create ? "^" : "") << op.index;
  }
  if (first) os << "0";
  return os.str();
}

Eigen::VectorXd apply_to_fock(const FermionOperator& op, const Eigen::VectorXd& v,
                              int n_spin_orbitals) {
  if (n_spin_orbitals < 1 || n_spin_orbitals > 20)
    throw std::invalid_argument("apply_to_fock: unsupported register size");
  const long dim = 1L << n_spin_orbitals;
  if (v.size() != dim) throw std::invalid_argument("apply_to_fock: dimension mismatch");
  if (op.max_index() >= n_spin_orbitals)
    throw std::invalid_argument("apply_to_fock: operator index out of range");

  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
  for (const FermionTerm& term : op.terms()) {
    for (long mask = 0; mask < dim; ++mask) {
      if (v[mask] == 0.0) continue;
      unsigned state = static_cast<unsigned>(mask);
      double amp = v[mask] * term.coefficient;
      bool dead = false;
      // Operators act right-to-left.
      for (auto it = term.ops.rbegin(); it != term.ops.rend(); ++it) {
        const unsigned bit = 1u << it->index;
        if (it->create == bool(state & bit)) {
          dead = true;
          break;
        }
        const int below = std::popcount(state & (bit - 1));
        if (below & 1) amp = -amp;
        state ^= bit;
      }
      if (!dead) out[state] += amp;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// ActiveSpaceIntegrals
// ---------------------------------------------------------------------------

ActiveSpaceIntegrals::ActiveSpaceIntegrals(int n_orbitals, double e_core)
    : n_orbitals_(n_orbitals), e_core_(e_core) {
  if (n_orbitals < 1) throw std::invalid_argument("n_orbitals must be positive");
  h1_ = Eigen::MatrixXd::Zero(n_orbitals, n_orbitals);
  const std::size_t n = static_cast<std::size_t>(n_orbitals);
  h2_.assign(n * n * n * n, 0.0);
}

std::size_t ActiveSpaceIntegrals::flat(int p, int q, int r, int s) const {
  const auto n = static_cast<std::size_t>(n_orbitals_);
  if (p < 0 || q < 0 || r < 0 || s < 0 || p >= n_orbitals_ || q >= n_orbitals_ ||
      r >= n_orbitals_ || s >= n_orbitals_)
    throw std::invalid_argument("orbital index out of range");
  return ((static_cast<std::size_t>(p) * n + q) * n + r) * n + s;
}

double ActiveSpaceIntegrals::one_body(int p, int q) const {
  if (p < 0 || q < 0 || p >= n_orbitals_ || q >= n_orbitals_)
    throw std::invalid_argument("orbital index out of range");
  return h1_(p, q);
}

void ActiveSpaceIntegrals::set_one_body(int p, int q, double value) {
  if (p < 0 || q < 0 || p >= n_orbitals_ || q >= n_orbitals_)
    throw std::invalid_argument("orbital index out of range");
  h1_(p, q) = value;
  h1_(q, p) = value;
}

double ActiveSpaceIntegrals::two_body(int p, int q, int r, int s) const {
  return h2_[flat(p, q, r, s)];
}

void ActiveSpaceIntegrals::set_two_body(int p, int q, int r, int s, double value) {
  // 8-fold symmetry of real-orbital (pq|rs).
  h2_[flat(p, q, r, s)] = value;
  h2_[flat(q, p, r, s)] = value;
  h2_[flat(p, q, s, r)] = value;
  h2_[flat(q, p, s, r)] = value;
  h2_[flat(r, s, p, q)] = value;
  h2_[flat(s, r, p, q)] = value;
  h2_[flat(r, s, q, p)] = value;
  h2_[flat(s, r, q, p)] = value;
}

void ActiveSpaceIntegrals::validate(double tol) const {
  if (n_orbitals_ < 1) throw std::invalid_argument("integrals: empty active space");
  for (int p = 0; p < n_orbitals_; ++p)
    for (int q = 0; q < n_orbitals_; ++q)
      if (std::abs(h1_(p, q) - h1_(q, p)) > tol)
        throw std::invalid_argument("integrals: h1 not symmetric");
  for (int p = 0; p < n_orbitals_; ++p)
    for (int q = 0; q < n_orbitals_; ++q)
      for (int r = 0; r < n_orbitals_; ++r)
        for (int s = 0; s < n_orbitals_; ++s) {
          const double v = two_body(p, q, r, s);
          if (std::abs(v - two_body(q, p, r, s)) > tol ||
              std::abs(v - two_body(p, q, s, r)) > tol ||
              std::abs(v - two_body(r, s, p, q)) > tol)
            throw std::invalid_argument("integrals: h2 breaks 8-fold symmetry");
        }
}

void SectorSpec::validate(int n_orbitals) const {
  if (n_electrons < 0 || n_electrons > 2 * n_orbitals)
    throw std::invalid_argument("sector: electron count out of range");
  if (std::abs(twice_sz) > n_electrons || ((n_electrons - twice_sz) & 1))
    throw std::invalid_argument("sector: Sz incompatible with N");
}

}  // namespace vqcas
