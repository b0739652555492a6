#include <cmath>
#include <stdexcept>

#include "vqcas/ansatz.hpp"

namespace vqcas {

AnsatzKind AnsatzKind::spin_restricted() { return {AnsatzFamily::SpinRestricted, 0, 2}; }

AnsatzKind AnsatzKind::real_amplitudes(int depth) {
  if (depth < 1) throw std::invalid_argument("real_amplitudes: depth must be positive");
  return {AnsatzFamily::RealAmplitudes, depth, 2};
}

AnsatzKind AnsatzKind::efficient_su2(int depth) {
  if (depth < 1) throw std::invalid_argument("efficient_su2: depth must be positive");
  return {AnsatzFamily::EfficientSU2, depth, 2};
}

AnsatzKind AnsatzKind::parse(const std::string& name) {
  auto depth_of = [&](std::size_t open) {
    const std::size_t close = name.find(')', open);
    if (close == std::string::npos) throw std::invalid_argument("ansatz: missing ')' in " + name);
    return std::stoi(name.substr(open + 1, close - open - 1));
  };
  if (name == "spin-restricted" || name == "sr") return spin_restricted();
  if (name.rfind("real-amplitudes(", 0) == 0)
    return real_amplitudes(depth_of(name.find('(')));
  if (name.rfind("ra(", 0) == 0) return real_amplitudes(depth_of(2));
  if (name.rfind("efficient-su2(", 0) == 0) return efficient_su2(depth_of(name.find('(')));
  throw std::invalid_argument("ansatz: unknown kind '" + name + "'");
}

std::string AnsatzKind::name() const {
  switch (family) {
    case AnsatzFamily::SpinRestricted:
      return "spin-restricted";
    case AnsatzFamily::RealAmplitudes:
      return "ra(" + std::to_string(depth) + ")";
    case AnsatzFamily::EfficientSU2:
      return "efficient-su2(" + std::to_string(depth) + ")";
  }
  return "?";
}

int parameter_count(const AnsatzKind& kind) {
  switch (kind.family) {
    case AnsatzFamily::SpinRestricted:
      return 2;
    case AnsatzFamily::RealAmplitudes:
      return 2 * (kind.depth + 1);
    case AnsatzFamily::EfficientSU2:
      return 4 * (kind.depth + 1);
  }
  return 0;
}

AnsatzParameters initial_parameters(const AnsatzKind& kind) {
  AnsatzParameters theta;
  theta.values.assign(static_cast<std::size_t>(parameter_count(kind)), 0.0);
  if (kind.family == AnsatzFamily::SpinRestricted) theta.values = {0.0, M_PI};
  return theta;
}

Circuit build(const AnsatzKind& kind, const AnsatzParameters& theta) {
  if (static_cast<int>(theta.values.size()) != parameter_count(kind))
    throw std::invalid_argument("ansatz: parameter length mismatch");
  Circuit c(kind.n_qubits);
  const std::vector<double>& t = theta.values;

  switch (kind.family) {
    case AnsatzFamily::SpinRestricted:
      // X on q1 prepares |10>; Ry(theta0) on q0 with the CNOT produces
      // sin(theta0/2)|01> + cos(theta0/2)|10>; the Ry(theta1)/Ry(-theta1)
      // pair rotates weight into the open-shell |00>+|11> combination.
      c.x(1);
      c.ry(0, t[0]);
      c.cnot(0, 1);
      c.ry(0, t[1]);
      c.ry(1, -t[1]);
      break;

    case AnsatzFamily::RealAmplitudes: {
      std::size_t k = 0;
      c.ry(0, t[k++]);
      c.ry(1, t[k++]);
      for (int layer = 0; layer < kind.depth; ++layer) {
        c.cnot(0, 1);
        c.ry(0, t[k++]);
        c.ry(1, t[k++]);
      }
      break;
    }

    case AnsatzFamily::EfficientSU2: {
      std::size_t k = 0;
      auto su2_layer = [&] {
        c.ry(0, t[k++]);
        c.ry(1, t[k++]);
        c.rz(0, t[k++]);
        c.rz(1, t[k++]);
      };
      su2_layer();
      for (int layer = 0; layer < kind.depth; ++layer) {
        c.cnot(0, 1);
        su2_layer();
      }
      break;
    }
  }
  return c;
}

Statevector spin_restricted_state(double theta0, double theta1) {
  const double u = theta0 / 2 + M_PI / 4;
  const double open_shell = std::cos(u) * std::sin(theta1) / std::sqrt(2.0);
  Eigen::VectorXcd amps(4);
  amps[0] = open_shell;                                                      // |00>
  amps[1] = (std::sin(u) - std::cos(u) * std::cos(theta1)) / std::sqrt(2.0); // |01>
  amps[2] = (std::sin(u) + std::cos(u) * std::cos(theta1)) / std::sqrt(2.0); // |10>
  amps[3] = open_shell;                                                      // |11>
  return Statevector::from_amplitudes(std::move(amps));
}

}  // namespace vqcas
