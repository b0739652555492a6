#include <cmath>
#include <limits>

#include "vqcas/solve.hpp"

namespace vqcas {

Backend Backend::statevector() { return Backend{}; }

Backend Backend::noisy_sampled(const NoiseModel& nm, bool mitigated, bool purified) {
  Backend b;
  b.mode = Mode::NoisySampled;
  b.noise = nm;
  b.mitigated = mitigated;
  b.purified = purified;
  return b;
}

void Backend::validate() const {
  if (purified && mode != Mode::NoisySampled)
    throw std::invalid_argument("backend: purification requires the sampled mode");
  noise.validate();
}

const std::vector<double>& VQDConfig::beta_presets() {
  static const std::vector<double> presets = {0.0, 1.0, 2.5, 5.0, 10.0};
  return presets;
}

namespace {

// One measurement context per solve: builds circuits, reuses a readout
// calibration, and knows how each backend evaluates an expectation.
class Pipeline {
 public:
  Pipeline(const AnsatzKind& kind, const Backend& backend) : kind_(kind), backend_(backend) {
    backend_.validate();
    if (backend_.mode == Backend::Mode::NoisySampled && backend_.mitigated)
      calibration_ = readout_calibrate(backend_.noise, kind_.n_qubits);
  }

  double expect(const AnsatzParameters& theta, const QubitOperator& op) const {
    const Circuit c = build(kind_, theta);
    if (backend_.is_statevector()) return expectation(run_statevector(c), op);
    return estimate_expectation(c, op, backend_.noise, backend_.mitigated, calibration_ptr())
        .value;
  }

  double expect_on(const Statevector& psi, const QubitOperator& op) const {
    return expectation(psi, op);
  }

  double overlap(const AnsatzParameters& theta_a, const AnsatzParameters& theta_b) const {
    if (backend_.is_statevector())
      return overlap_probability(run_statevector(build(kind_, theta_a)),
                                 run_statevector(build(kind_, theta_b)));
    Circuit c = build(kind_, theta_b);
    c.append(build(kind_, theta_a).inverse());
    const Counts counts = sample_counts(c, Circuit(kind_.n_qubits), backend_.noise);
    const std::vector<double> probs =
        backend_.mitigated ? mitigate_counts(counts, *calibration_) : counts.frequencies();
    return probs[0];
  }

  Purified purified_state(const AnsatzParameters& theta) const {
    const DensityMatrix rho = tomography(build(kind_, theta), backend_.noise);
    return purify(rho);
  }

  const AnsatzKind& kind() const { return kind_; }
  const Backend& backend() const { return backend_; }

 private:
  const Eigen::MatrixXd* calibration_ptr() const {
    return calibration_ ? &*calibration_ : nullptr;
  }

  AnsatzKind kind_;
  Backend backend_;
  std::optional<Eigen::MatrixXd> calibration_;
};

// Shared tail of every solver: converged parameters -> reported record,
// with the tomography/purify/reevaluate/refit sequence in purified mode.
SolveResult finish_solve(const Pipeline& pipeline, const QubitOperator& hamiltonian,
                         const QubitOperator* s2, OptResult opt) {
  SolveResult result;
  result.theta_star.values = opt.x_best;

  if (pipeline.backend().purified) {
    const Purified pur = pipeline.purified_state(result.theta_star);
    result.purified_weight = pur.weight;
    result.energy = pipeline.expect_on(pur.psi, hamiltonian);
    if (s2) result.s_squared = pipeline.expect_on(pur.psi, *s2);
    const RefitResult refit = refit_parameters(pipeline.kind(), pur.psi, result.theta_star);
    result.poor_refit = refit.poor_fit;
    if (!refit.poor_fit) result.theta_star = refit.params;
  } else {
    result.energy = pipeline.expect(result.theta_star, hamiltonian);
    if (s2) result.s_squared = pipeline.expect(result.theta_star, *s2);
  }
  if (!s2) result.s_squared = std::numeric_limits<double>::quiet_NaN();
  result.opt = std::move(opt);
  return result;
}

ObjectiveFn energy_objective(const Pipeline& pipeline, const QubitOperator& hamiltonian) {
  return [&pipeline, &hamiltonian](std::span<const double> theta) {
    AnsatzParameters p{std::vector<double>(theta.begin(), theta.end())};
    return pipeline.expect(p, hamiltonian);
  };
}

}  // namespace

namespace {

std::vector<double> starting_point(const AnsatzKind& kind, const AnsatzParameters* start) {
  if (!start) return initial_parameters(kind).values;
  if (static_cast<int>(start->values.size()) != parameter_count(kind))
    throw std::invalid_argument("solve: starting parameter length mismatch");
  return start->values;
}

}  // namespace

SolveResult vqe(const QubitOperator& hamiltonian, const AnsatzKind& kind, const Backend& backend,
                const OptimizerConfig& cfg, const QubitOperator* s2,
                const AnsatzParameters* start) {
  Pipeline pipeline(kind, backend);
  const OptResult opt = minimize(energy_objective(pipeline, hamiltonian), {},
                                 starting_point(kind, start), cfg);
  return finish_solve(pipeline, hamiltonian, s2, opt);
}

SolveResult vqd(const QubitOperator& hamiltonian, const AnsatzKind& kind, const Backend& backend,
                const OptimizerConfig& cfg, const std::vector<AnsatzParameters>& lower,
                const VQDConfig& vqd_cfg, const QubitOperator& s2,
                const AnsatzParameters* start) {
  if (vqd_cfg.beta < 0 || vqd_cfg.gamma < 0)
    throw std::invalid_argument("vqd: penalty weights must be nonnegative");
  Pipeline pipeline(kind, backend);

  const ObjectiveFn cost = [&](std::span<const double> theta) {
    AnsatzParameters p{std::vector<double>(theta.begin(), theta.end())};
    double value = pipeline.expect(p, hamiltonian);
    for (const AnsatzParameters& prev : lower) value += vqd_cfg.beta * pipeline.overlap(p, prev);
    if (vqd_cfg.gamma != 0.0) value += vqd_cfg.gamma * pipeline.expect(p, s2);
    return value;
  };

  const OptResult opt = minimize(cost, {}, starting_point(kind, start), cfg);
  SolveResult result = finish_solve(pipeline, hamiltonian, &s2, opt);
  for (const AnsatzParameters& prev : lower)
    result.overlaps_with_lower.push_back(pipeline.overlap(result.theta_star, prev));
  return result;
}

SolveResult vqe_ac(const QubitOperator& hamiltonian, const AnsatzKind& kind,
                   const Backend& backend, const OptimizerConfig& cfg,
                   const std::vector<AnsatzParameters>& lower, double epsilon,
                   const QubitOperator* s2, const AnsatzParameters* start) {
  if (epsilon <= 0) throw std::invalid_argument("vqe_ac: epsilon must be positive");
  Pipeline pipeline(kind, backend);

  std::vector<ObjectiveFn> constraints;
  constraints.reserve(lower.size());
  for (const AnsatzParameters& prev : lower) {
    constraints.push_back([&pipeline, prev, epsilon](std::span<const double> theta) {
      AnsatzParameters p{std::vector<double>(theta.begin(), theta.end())};
      return epsilon - pipeline.overlap(p, prev);
    });
  }

  const OptResult opt = minimize(energy_objective(pipeline, hamiltonian), constraints,
                                 starting_point(kind, start), cfg);
  SolveResult result = finish_solve(pipeline, hamiltonian, s2, opt);
  result.constraint_warning = result.opt.constraint_violation > 0;
  for (const AnsatzParameters& prev : lower)
    result.overlaps_with_lower.push_back(pipeline.overlap(result.theta_star, prev));
  return result;
}

double measure_overlap(const AnsatzParameters& theta_a, const AnsatzParameters& theta_b,
                       const AnsatzKind& kind, const Backend& backend) {
  return Pipeline(kind, backend).overlap(theta_a, theta_b);
}

double measure_s_squared(const AnsatzParameters& theta, const AnsatzKind& kind,
                         const Backend& backend, const QubitOperator& s2) {
  Pipeline pipeline(kind, backend);
  if (backend.purified) return pipeline.expect_on(pipeline.purified_state(theta).psi, s2);
  return pipeline.expect(theta, s2);
}

}  // namespace vqcas
