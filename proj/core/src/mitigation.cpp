#include <algorithm>
#include <cmath>
#include <numeric>

#include "vqcas/sim.hpp"

namespace vqcas {

namespace {

// Lawson-Hanson nonnegative least squares, small dense problems only.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const long n = A.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 1e-12 * A.cwiseAbs().maxCoeff();

  for (long outer = 0; outer < 4 * n + 16; ++outer) {
    const Eigen::VectorXd w = A.transpose() * (b - A * x);
    long best = -1;
    double wmax = tol;
    for (long j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > wmax) {
        wmax = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    for (long inner = 0; inner < 4 * n + 16; ++inner) {
      std::vector<long> idx;
      for (long j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
      Eigen::MatrixXd Ap(A.rows(), static_cast<long>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<long>(k)) = A.col(idx[k]);
      const Eigen::VectorXd z = Ap.colPivHouseholderQr().solve(b);

      bool all_positive = true;
      double alpha = 1.0;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (z[static_cast<long>(k)] <= 0) {
          all_positive = false;
          const double xk = x[idx[k]];
          const double step = xk / (xk - z[static_cast<long>(k)]);
          alpha = std::min(alpha, step);
        }
      }
      if (all_positive) {
        x.setZero();
        for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] = z[static_cast<long>(k)];
        break;
      }
      for (std::size_t k = 0; k < idx.size(); ++k)
        x[idx[k]] += alpha * (z[static_cast<long>(k)] - x[idx[k]]);
      for (long j : idx)
        if (x[j] <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
    }
  }
  return x;
}

}  // namespace

std::vector<double> mitigate_counts(const Counts& raw, const Eigen::MatrixXd& calibration) {
  const long dim = calibration.rows();
  if (calibration.cols() != dim) throw std::invalid_argument("mitigate_counts: matrix not square");
  if ((1L << raw.n_qubits) != dim)
    throw std::invalid_argument("mitigate_counts: calibration size mismatch");
  for (long col = 0; col < dim; ++col)
    if (std::abs(calibration.col(col).sum() - 1.0) > 1e-9)
      throw std::invalid_argument("mitigate_counts: calibration not column-stochastic");

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(calibration);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  const double smax = svd.singularValues()(0);
  if (smin <= 0 || smax / smin > 1e6)
    throw MitigationError("mitigate_counts: calibration matrix is singular or ill-conditioned");

  const std::vector<double> freq = raw.frequencies();
  const Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(freq.data(), dim);

  // Augment with the normalization row; nonnegativity from NNLS.
  Eigen::MatrixXd A(dim + 1, dim);
  A.topRows(dim) = calibration;
  A.row(dim).setOnes();
  Eigen::VectorXd b(dim + 1);
  b.head(dim) = f;
  b[dim] = 1.0;

  Eigen::VectorXd p = nnls(A, b);
  const double total = p.sum();
  if (total <= 0) throw MitigationError("mitigate_counts: degenerate solution");
  p /= total;
  return std::vector<double>(p.data(), p.data() + dim);
}

}  // namespace vqcas
