#pragma once

// Derivative-free constrained minimization in the COBYLA style: linear
// interpolation models over a simplex inside a shrinking trust region,
// with inequality constraints g(x) >= 0 handled through a merit function.

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "vqcas/errors.hpp"

namespace vqcas {

struct OptimizerConfig {
  double rho_begin = 0.5;    // initial trust radius (radians here)
  double rho_end = 1e-4;     // final radius / parameter-scale stop
  int max_evaluations = 100;
  double f_tolerance = 1e-4;  // objective-change stop between radius levels

  void validate() const;
};

struct OptResult {
  std::vector<double> x_best;
  double f_best = 0.0;
  int n_evaluations = 0;
  /// max over constraints of max(0, -g) at x_best; 0 when feasible.
  double constraint_violation = 0.0;
  std::vector<std::pair<std::vector<double>, double>> history;  // one entry per evaluation
};

using ObjectiveFn = std::function<double(std::span<const double>)>;

/// Minimizes `objective` subject to every constraint g(x) >= 0, starting
/// from x0. Stops when the trust radius shrinks below rho_end, when the
/// best objective improves by less than f_tolerance across a radius
/// level, or at the evaluation budget. Non-finite evaluations abort with
/// OptimizationError. If no feasible point was seen by the end, the
/// least-violating best point is returned with constraint_violation > 0.
OptResult minimize(const ObjectiveFn& objective, const std::vector<ObjectiveFn>& constraints,
                   std::vector<double> x0, const OptimizerConfig& cfg);

}  // namespace vqcas
