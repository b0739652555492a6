// Powell-style COBYLA: linear interpolation models of the objective and
// constraints over an n+1 vertex simplex, a two-stage linear subproblem
// inside a trust region, and a merit function f + parmu * maxviolation.
// Follows M. J. D. Powell's published algorithm; exact parity with any
// particular implementation is a non-goal.

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "vqcas/opt.hpp"

namespace vqcas {

void OptimizerConfig::validate() const {
  if (!(rho_end > 0) || !(rho_end <= rho_begin))
    throw std::invalid_argument("optimizer: need 0 < rho_end <= rho_begin");
  if (max_evaluations < 1) throw std::invalid_argument("optimizer: empty evaluation budget");
  if (f_tolerance < 0) throw std::invalid_argument("optimizer: negative f_tolerance");
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct BudgetExhausted {};
struct CycleBudgetExhausted {};

constexpr double kFeasibilityTol = 1e-10;

// Records every evaluation and maintains the returned best point:
// the lowest objective among feasible points, or the least-violating
// point when nothing feasible was seen.
struct Bookkeeping {
  std::vector<std::pair<std::vector<double>, double>> history;
  std::vector<double> best_x;
  double best_f = std::numeric_limits<double>::infinity();
  double best_viol = std::numeric_limits<double>::infinity();

  void record(const VectorXd& x, double f, double viol) {
    std::vector<double> xv(x.data(), x.data() + x.size());
    history.emplace_back(xv, f);
    const bool feasible = viol <= kFeasibilityTol;
    const bool best_feasible = best_viol <= kFeasibilityTol;
    bool better = false;
    if (feasible && !best_feasible)
      better = true;
    else if (feasible == best_feasible)
      better = feasible ? (f < best_f) : (viol < best_viol || (viol == best_viol && f < best_f));
    if (better || history.size() == 1) {
      best_x = std::move(xv);
      best_f = f;
      best_viol = viol;
    }
  }

  double best_feasible_f() const {
    return best_viol <= kFeasibilityTol ? best_f : std::numeric_limits<double>::infinity();
  }
};

// The trust-region subproblem: first minimize the largest violation of
// the linearized constraints A(:,k).dx >= b(k) within |dx| <= rho, then
// minimize the linearized objective (-A(:,m).dx) without increasing the
// attained violation. Returns false when the step could not reach the
// trust boundary (degenerate geometry).
bool trstlp(int n, int m, const MatrixXd& A, const VectorXd& b, double rho, VectorXd& dx) {
  MatrixXd z = MatrixXd::Identity(n, n);
  VectorXd zdota = VectorXd::Zero(n);
  VectorXd vmultc = VectorXd::Zero(m + 1);
  VectorXd vmultd = VectorXd::Zero(m + 1);
  VectorXd sdirn = VectorXd::Zero(n);
  VectorXd dxnew = VectorXd::Zero(n);
  std::vector<int> iact(static_cast<std::size_t>(m + 1), 0);

  bool ifull = true;
  int mcon = m;  // number of constraints considered; m+1 once the objective joins
  int nact = 0;
  int nactx = 0;
  double resmax = 0.0;
  int icon = -1;
  dx.setZero(n);

  for (int k = 0; k < m; ++k) {
    if (b[k] > resmax) {
      resmax = b[k];
      icon = k;
    }
  }
  for (int k = 0; k < m; ++k) {
    iact[static_cast<std::size_t>(k)] = k;
    vmultc[k] = resmax - b[k];
  }

  double optold = 0, optnew = 0, resold = 0, stpful = 0, step = 0;
  int icount = 0;

  enum class At { StageStart, Iterate, EnterStageTwo, Degenerate, Done };
  At at = (resmax == 0.0) ? At::EnterStageTwo : At::StageStart;

  long guard = 0;
  while (true) {
    if (++guard > 100000) return false;
    switch (at) {
      case At::StageStart:
        optold = 0;
        icount = 0;
        at = At::Iterate;
        break;

      case At::EnterStageTwo:
        mcon = m + 1;
        icon = m;
        iact[static_cast<std::size_t>(m)] = m;
        vmultc[m] = 0.0;
        at = At::StageStart;
        break;

      case At::Degenerate:
        if (mcon == m) {
          at = At::EnterStageTwo;
          break;
        }
        ifull = false;
        at = At::Done;
        break;

      case At::Done:
        return ifull;

      case At::Iterate: {
        optnew = (mcon == m) ? resmax : -dx.dot(A.col(m));
        if (icount == 0 || optnew < optold) {
          optold = optnew;
          nactx = nact;
          icount = 3;
        } else if (nact > nactx) {
          nactx = nact;
          icount = 3;
        } else if (--icount == 0) {
          at = At::Degenerate;
          break;
        }

        if (icon >= nact) {
          // Activate constraint iact[icon]: rotate z so its gradient has
          // support only on the first nact+1 columns.
          const int kk = iact[static_cast<std::size_t>(icon)];
          dxnew = A.col(kk);
          double tot = 0.0;
          for (int k = n - 1; k >= nact; --k) {
            double sp = 0, spabs = 0;
            for (int i = 0; i < n; ++i) {
              const double t = z(i, k) * dxnew[i];
              sp += t;
              spabs += std::abs(t);
            }
            const double acca = spabs + 0.1 * std::abs(sp);
            const double accb = spabs + 0.2 * std::abs(sp);
            if (spabs >= acca || acca >= accb) sp = 0.0;
            if (tot == 0.0) {
              tot = sp;
            } else {
              const int kp = k + 1;
              double temp = std::sqrt(sp * sp + tot * tot);
              const double alpha = sp / temp;
              const double beta = tot / temp;
              tot = temp;
              for (int i = 0; i < n; ++i) {
                temp = alpha * z(i, k) + beta * z(i, kp);
                z(i, kp) = alpha * z(i, kp) - beta * z(i, k);
                z(i, k) = temp;
              }
            }
          }

          if (tot != 0.0) {
            ++nact;
            zdota[nact - 1] = tot;
            vmultc[icon] = vmultc[nact - 1];
            vmultc[nact - 1] = 0.0;
          } else {
            // Gradient is dependent on the active set: drop one
            // constraint, picked through the Lagrange multipliers.
            double ratio = -1.0;
            for (int k = nact - 1; k >= 0; --k) {
              double zdotv = 0, zdvabs = 0;
              for (int i = 0; i < n; ++i) {
                const double t = z(i, k) * dxnew[i];
                zdotv += t;
                zdvabs += std::abs(t);
              }
              const double acca = zdvabs + 0.1 * std::abs(zdotv);
              const double accb = zdvabs + 0.2 * std::abs(zdotv);
              if (zdvabs < acca && acca < accb) {
                const double temp = zdotv / zdota[k];
                if (temp > 0.0 && iact[static_cast<std::size_t>(k)] < m) {
                  const double tempa = vmultc[k] / temp;
                  if (ratio < 0.0 || tempa < ratio) ratio = tempa;
                }
                if (k >= 1) {
                  const int kw = iact[static_cast<std::size_t>(k)];
                  dxnew -= temp * A.col(kw);
                }
                vmultd[k] = temp;
              } else {
                vmultd[k] = 0.0;
              }
            }
            if (ratio < 0.0) {
              at = At::Degenerate;
              break;
            }
            for (int k = 0; k < nact; ++k) vmultc[k] = std::max(0.0, vmultc[k] - ratio * vmultd[k]);
            if (icon < nact - 1) {
              const int isave = iact[static_cast<std::size_t>(icon)];
              const double vsave = vmultc[icon];
              int k = icon;
              while (true) {
                const int kp = k + 1;
                const int kw = iact[static_cast<std::size_t>(kp)];
                double sp = 0;
                for (int i = 0; i < n; ++i) sp += z(i, k) * A(i, kw);
                double temp = std::sqrt(sp * sp + zdota[kp] * zdota[kp]);
                const double alpha = zdota[kp] / temp;
                const double beta = sp / temp;
                zdota[kp] = alpha * zdota[k];
                zdota[k] = temp;
                for (int i = 0; i < n; ++i) {
                  temp = alpha * z(i, kp) + beta * z(i, k);
                  z(i, kp) = alpha * z(i, k) - beta * z(i, kp);
                  z(i, k) = temp;
                }
                iact[static_cast<std::size_t>(k)] = kw;
                vmultc[k] = vmultc[kp];
                k = kp;
                if (k >= nact - 1) break;
              }
              iact[static_cast<std::size_t>(k)] = isave;
              vmultc[k] = vsave;
            }
            double temp = 0;
            for (int i = 0; i < n; ++i) temp += z(i, nact - 1) * A(i, kk);
            if (temp == 0.0) {
              at = At::Degenerate;
              break;
            }
            zdota[nact - 1] = temp;
            vmultc[icon] = 0.0;
            vmultc[nact - 1] = ratio;
          }

          iact[static_cast<std::size_t>(icon)] = iact[static_cast<std::size_t>(nact - 1)];
          iact[static_cast<std::size_t>(nact - 1)] = kk;
          if (mcon > m && kk != m) {
            // Keep the objective as the last active constraint.
            const int k = nact - 2;
            double sp = 0;
            for (int i = 0; i < n; ++i) sp += z(i, k) * A(i, kk);
            double temp = std::sqrt(sp * sp + zdota[nact - 1] * zdota[nact - 1]);
            const double alpha = zdota[nact - 1] / temp;
            const double beta = sp / temp;
            zdota[nact - 1] = alpha * zdota[k];
            zdota[k] = temp;
            for (int i = 0; i < n; ++i) {
              temp = alpha * z(i, nact - 1) + beta * z(i, k);
              z(i, nact - 1) = alpha * z(i, k) - beta * z(i, nact - 1);
              z(i, k) = temp;
            }
            iact[static_cast<std::size_t>(nact - 1)] = iact[static_cast<std::size_t>(k)];
            iact[static_cast<std::size_t>(k)] = kk;
            std::swap(vmultc[k], vmultc[nact - 1]);
          }
          if (mcon > m) {
            sdirn = z.col(nact - 1) / zdota[nact - 1];
          } else {
            const int kk2 = iact[static_cast<std::size_t>(nact - 1)];
            double temp = 0;
            for (int i = 0; i < n; ++i) temp += sdirn[i] * A(i, kk2);
            temp = (temp - 1.0) / zdota[nact - 1];
            sdirn -= temp * z.col(nact - 1);
          }
        } else {
          // Deactivate constraint at position icon.
          if (icon < nact - 1) {
            const int isave = iact[static_cast<std::size_t>(icon)];
            const double vsave = vmultc[icon];
            int k = icon;
            while (true) {
              const int kp = k + 1;
              const int kk = iact[static_cast<std::size_t>(kp)];
              double sp = 0;
              for (int i = 0; i < n; ++i) sp += z(i, k) * A(i, kk);
              double temp = std::sqrt(sp * sp + zdota[kp] * zdota[kp]);
              const double alpha = zdota[kp] / temp;
              const double beta = sp / temp;
              zdota[kp] = alpha * zdota[k];
              zdota[k] = temp;
              for (int i = 0; i < n; ++i) {
                temp = alpha * z(i, kp) + beta * z(i, k);
                z(i, kp) = alpha * z(i, k) - beta * z(i, kp);
                z(i, k) = temp;
              }
              iact[static_cast<std::size_t>(k)] = kk;
              vmultc[k] = vmultc[kp];
              k = kp;
              if (k >= nact - 1) break;
            }
            iact[static_cast<std::size_t>(k)] = isave;
            vmultc[k] = vsave;
          }
          --nact;
          if (mcon > m) {
            sdirn = z.col(nact - 1) / zdota[nact - 1];
          } else {
            double temp = 0;
            for (int i = 0; i < n; ++i) temp += sdirn[i] * z(i, nact);
            sdirn -= temp * z.col(nact);
          }
        }

        // Step length to the trust boundary (or the violation-zeroing
        // step in stage one).
        double dd = rho * rho, sd = 0, ss = 0;
        for (int i = 0; i < n; ++i) {
          if (std::abs(dx[i]) >= 1e-6 * rho) dd -= dx[i] * dx[i];
          sd += dx[i] * sdirn[i];
          ss += sdirn[i] * sdirn[i];
        }
        if (dd <= 0.0) {
          at = At::Degenerate;
          break;
        }
        double temp = std::sqrt(ss * dd);
        if (std::abs(sd) >= 1e-6 * temp) temp = std::sqrt(ss * dd + sd * sd);
        stpful = dd / (temp + sd);
        step = stpful;
        if (mcon == m) {
          const double acca = step + 0.1 * resmax;
          const double accb = step + 0.2 * resmax;
          if (step >= acca || acca >= accb) {
            at = At::EnterStageTwo;
            break;
          }
          step = std::min(step, resmax);
        }

        dxnew = dx + step * sdirn;
        if (mcon == m) {
          resold = resmax;
          resmax = 0.0;
          for (int k = 0; k < nact; ++k) {
            const int kk = iact[static_cast<std::size_t>(k)];
            double res = b[kk];
            for (int i = 0; i < n; ++i) res -= A(i, kk) * dxnew[i];
            resmax = std::max(resmax, res);
          }
        }

        // Multipliers that would hold at dxnew.
        {
          int k = nact - 1;
          while (true) {
            double zdotw = 0, zdwabs = 0;
            for (int i = 0; i < n; ++i) {
              const double t = z(i, k) * dxnew[i];
              zdotw += t;
              zdwabs += std::abs(t);
            }
            const double acca = zdwabs + 0.1 * std::abs(zdotw);
            const double accb = zdwabs + 0.2 * std::abs(zdotw);
            if (zdwabs >= acca || acca >= accb) zdotw = 0.0;
            vmultd[k] = zdotw / zdota[k];
            if (k < 1) break;
            const int kk = iact[static_cast<std::size_t>(k)];
            dxnew -= vmultd[k] * A.col(kk);
            --k;
          }
          if (mcon > m) vmultd[nact - 1] = std::max(0.0, vmultd[nact - 1]);
        }

        dxnew = dx + step * sdirn;
        for (int k = nact; k < mcon; ++k) {
          const int kk = iact[static_cast<std::size_t>(k)];
          double sum = resmax - b[kk];
          double sumabs = resmax + std::abs(b[kk]);
          for (int i = 0; i < n; ++i) {
            const double t = A(i, kk) * dxnew[i];
            sum += t;
            sumabs += std::abs(t);
          }
          const double acca = sumabs + 0.1 * std::abs(sum);
          const double accb = sumabs + 0.2 * std::abs(sum);
          if (sumabs >= acca || acca >= accb) sum = 0.0;
          vmultd[k] = sum;
        }

        double ratio = 1.0;
        icon = -1;
        for (int k = 0; k < mcon; ++k) {
          if (vmultd[k] < 0.0) {
            const double t = vmultc[k] / (vmultc[k] - vmultd[k]);
            if (t < ratio) {
              ratio = t;
              icon = k;
            }
          }
        }

        const double frac = 1.0 - ratio;
        dx = frac * dx + ratio * dxnew;
        for (int k = 0; k < mcon; ++k) vmultc[k] = std::max(0.0, frac * vmultc[k] + ratio * vmultd[k]);
        if (mcon == m) resmax = resold + ratio * (resmax - resold);

        if (icon >= 0) {
          at = At::Iterate;
          break;
        }
        if (step == stpful) {
          at = At::Done;
          break;
        }
        at = At::EnterStageTwo;
        break;
      }
    }
  }
}

class Cobyla {
 public:
  Cobyla(const ObjectiveFn& objective, const std::vector<ObjectiveFn>& constraints,
         const VectorXd& x0, const OptimizerConfig& cfg, double rho_begin, int eval_cap,
         Bookkeeping& bk)
      : objective_(objective),
        constraints_(constraints),
        cfg_(cfg),
        rho_begin_(rho_begin),
        eval_cap_(eval_cap),
        bk_(bk),
        n_(static_cast<int>(x0.size())),
        m_(static_cast<int>(constraints.size())),
        x_(x0) {
    sim_.setZero(n_, n_ + 1);
    simi_.setZero(n_, n_);
    datmat_.setZero(m_ + 2, n_ + 1);
    A_.setZero(n_, m_ + 1);
    b_.setZero(m_ + 1);
    con_.setZero(m_ + 2);
    dx_.setZero(n_);
    vsig_.setZero(n_);
    veta_.setZero(n_);
    sigbar_.setZero(n_);
  }

  void run() {
    const int np = n_;  // column index of the pole vertex
    rho_ = rho_begin_;
    parmu_ = 0.0;
    sim_.col(np) = x_;
    for (int i = 0; i < n_; ++i) {
      sim_(i, i) = rho_;
      simi_(i, i) = 1.0 / rho_;
    }
    int jdrop = np;
    int ibrnch = 0;
    int iflag = 0;
    int nfvals = 0;
    double f = 0, resmax = 0, prerec = 0, prerem = 0;
    double parsig = 0, pareta = 0;

    enum class Step { Evaluate, MainIteration, TrustStep, RatioTest, ShrinkOrStop };
    Step step = Step::Evaluate;

    long guard = 0;
    while (true) {
      if (++guard > 1000L * (cfg_.max_evaluations + 100))
        throw OptimizationError("cobyla: iteration guard tripped (internal cycling)");

      switch (step) {
        case Step::Evaluate: {
          evaluate(x_, f, resmax, nfvals);
          con_[m_] = f;
          con_[m_ + 1] = resmax;
          if (ibrnch == 1) {
            step = Step::RatioTest;
            break;
          }
          datmat_.col(jdrop) = con_;
          if (nfvals <= n_ + 1) {
            // Still assembling the initial simplex.
            if (jdrop < n_) {
              if (datmat_(m_, np) <= f) {
                x_[jdrop] = sim_(jdrop, np);
              } else {
                sim_(jdrop, np) = x_[jdrop];
                for (int k = 0; k < m_ + 2; ++k) {
                  datmat_(k, jdrop) = datmat_(k, np);
                  datmat_(k, np) = con_[k];
                }
                for (int k = 0; k <= jdrop; ++k) {
                  sim_(jdrop, k) = -rho_;
                  double t = 0.0;
                  for (int i = k; i <= jdrop; ++i) t -= simi_(i, k);
                  simi_(jdrop, k) = t;
                }
              }
            }
            if (nfvals <= n_) {
              jdrop = nfvals - 1;
              x_[jdrop] += rho_;
              step = Step::Evaluate;
              break;
            }
          }
          ibrnch = 1;
          step = Step::MainIteration;
          break;
        }

        case Step::MainIteration: {
          // Move the lowest-merit vertex into the pole position.
          double phimin = datmat_(m_, np) + parmu_ * datmat_(m_ + 1, np);
          int nbest = np;
          for (int j = 0; j < n_; ++j) {
            const double temp = datmat_(m_, j) + parmu_ * datmat_(m_ + 1, j);
            if (temp < phimin) {
              nbest = j;
              phimin = temp;
            } else if (temp == phimin && parmu_ == 0.0 &&
                       datmat_(m_ + 1, j) < datmat_(m_ + 1, nbest)) {
              nbest = j;
            }
          }
          if (nbest != np) {
            for (int k = 0; k < m_ + 2; ++k) std::swap(datmat_(k, np), datmat_(k, nbest));
            for (int i = 0; i < n_; ++i) {
              const double temp = sim_(i, nbest);
              sim_(i, nbest) = 0.0;
              sim_(i, np) += temp;
              double tempa = 0.0;
              for (int k = 0; k < n_; ++k) {
                sim_(i, k) -= temp;
                tempa -= simi_(k, i);
              }
              simi_(nbest, i) = tempa;
            }
          }

          // Bail out if simi has decayed as an inverse of sim.
          double error = 0.0;
          for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
              double t = (i == j) ? -1.0 : 0.0;
              for (int k = 0; k < n_; ++k) t += simi_(i, k) * sim_(k, j);
              error = std::max(error, std::abs(t));
            }
          if (error > 0.1) return;

          // Linear models from the vertex values; column m_ holds minus
          // the objective gradient.
          for (int k = 0; k <= m_; ++k) {
            b_[k] = -datmat_(k, np);
            for (int i = 0; i < n_; ++i) {
              double t = 0.0;
              for (int j = 0; j < n_; ++j) t += (datmat_(k, j) + b_[k]) * simi_(j, i);
              A_(i, k) = (k == m_) ? -t : t;
            }
          }

          iflag = 1;
          parsig = 0.25 * rho_;
          pareta = 2.1 * rho_;
          for (int j = 0; j < n_; ++j) {
            vsig_[j] = 1.0 / simi_.row(j).norm();
            veta_[j] = sim_.col(j).norm();
            if (vsig_[j] < parsig || veta_[j] > pareta) iflag = 0;
          }

          if (ibrnch == 1 || iflag == 1) {
            step = Step::TrustStep;
            break;
          }

          // Geometry step: replace the vertex with the worst shape.
          int jd = -1;
          double temp = pareta;
          for (int j = 0; j < n_; ++j) {
            if (veta_[j] > temp) {
              jd = j;
              temp = veta_[j];
            }
          }
          if (jd < 0) {
            for (int j = 0; j < n_; ++j) {
              if (vsig_[j] < temp) {
                jd = j;
                temp = vsig_[j];
              }
            }
          }
          jdrop = jd;

          const double scale = 0.5 * rho_ * vsig_[jdrop];
          dx_ = scale * simi_.row(jdrop).transpose();
          double cvmaxp = 0, cvmaxm = 0, sum = 0;
          for (int k = 0; k <= m_; ++k) {
            sum = A_.col(k).dot(dx_);
            if (k < m_) {
              const double t = datmat_(k, np);
              cvmaxp = std::max(cvmaxp, -sum - t);
              cvmaxm = std::max(cvmaxm, sum - t);
            }
          }
          const double dxsign = (parmu_ * (cvmaxp - cvmaxm) > 2.0 * sum) ? -1.0 : 1.0;
          dx_ *= dxsign;
          update_simplex(jdrop);
          x_ = sim_.col(np) + dx_;
          step = Step::Evaluate;
          break;
        }

        case Step::TrustStep: {
          const bool ifull = trstlp(n_, m_, A_, b_, rho_, dx_);
          if (!ifull && dx_.squaredNorm() < 0.25 * rho_ * rho_) {
            ibrnch = 1;
            step = Step::ShrinkOrStop;
            break;
          }

          // Predicted violation and objective change at the new point.
          double resnew = 0.0, sum = 0.0;
          b_[m_] = 0.0;
          for (int k = 0; k <= m_; ++k) {
            sum = b_[k] - A_.col(k).dot(dx_);
            if (k < m_) resnew = std::max(resnew, sum);
          }
          prerec = datmat_(m_ + 1, np) - resnew;
          const double barmu = (prerec > 0.0) ? sum / prerec : 0.0;
          if (parmu_ < 1.5 * barmu) {
            parmu_ = 2.0 * barmu;
            const double phi = datmat_(m_, np) + parmu_ * datmat_(m_ + 1, np);
            bool revisit = false;
            for (int j = 0; j < n_ && !revisit; ++j) {
              const double temp = datmat_(m_, j) + parmu_ * datmat_(m_ + 1, j);
              if (temp < phi) revisit = true;
              if (temp == phi && parmu_ == 0.0 && datmat_(m_ + 1, j) < datmat_(m_ + 1, np))
                revisit = true;
            }
            if (revisit) {
              step = Step::MainIteration;
              break;
            }
          }
          prerem = parmu_ * prerec - sum;
          x_ = sim_.col(np) + dx_;
          ibrnch = 1;
          step = Step::Evaluate;
          break;
        }

        case Step::RatioTest: {
          const double vmold = datmat_(m_, np) + parmu_ * datmat_(m_ + 1, np);
          const double vmnew = f + parmu_ * resmax;
          double trured = vmold - vmnew;
          if (parmu_ == 0.0 && f == datmat_(m_, np)) {
            prerem = prerec;
            trured = datmat_(m_ + 1, np) - resmax;
          }

          double ratio = (trured <= 0.0) ? 1.0 : 0.0;
          int jd = -1;
          for (int j = 0; j < n_; ++j) {
            const double t = std::abs(simi_.row(j).dot(dx_));
            if (t > ratio) {
              jd = j;
              ratio = t;
            }
            sigbar_[j] = t * vsig_[j];
          }

          double edgmax = 1.1 * rho_;
          int l = -1;
          for (int j = 0; j < n_; ++j) {
            if (sigbar_[j] >= parsig || sigbar_[j] >= vsig_[j]) {
              const double t = (trured > 0.0) ? (dx_ - sim_.col(j)).norm() : veta_[j];
              if (t > edgmax) {
                l = j;
                edgmax = t;
              }
            }
          }
          if (l >= 0) jd = l;
          if (jd < 0) {
            step = Step::ShrinkOrStop;
            break;
          }
          jdrop = jd;
          update_simplex(jdrop);
          datmat_.col(jdrop) = con_;
          if (trured > 0.0 && trured >= 0.1 * prerem) {
            step = Step::MainIteration;
            break;
          }
          step = Step::ShrinkOrStop;
          break;
        }

        case Step::ShrinkOrStop: {
          if (iflag == 0) {
            ibrnch = 0;
            step = Step::MainIteration;
            break;
          }
          if (rho_ <= cfg_.rho_end) return;

          rho_ *= 0.5;
          if (rho_ <= 1.5 * cfg_.rho_end) rho_ = cfg_.rho_end;
          if (parmu_ > 0.0) {
            double denom = 0.0, cmin = 0.0, cmax = 0.0;
            for (int k = 0; k <= m_; ++k) {
              cmin = cmax = datmat_(k, np);
              for (int j = 0; j < n_; ++j) {
                cmin = std::min(cmin, datmat_(k, j));
                cmax = std::max(cmax, datmat_(k, j));
              }
              if (k < m_ && cmin < 0.5 * cmax) {
                const double t = std::max(cmax, 0.0) - cmin;
                denom = (denom <= 0.0) ? t : std::min(denom, t);
              }
            }
            if (denom == 0.0) {
              parmu_ = 0.0;
            } else if (cmax - cmin < parmu_ * denom) {
              parmu_ = (cmax - cmin) / denom;
            }
          }

          // Objective-change stop: once the whole (feasible) simplex sits
          // within f_tolerance in objective value, further refinement
          // cannot change the result by more than the threshold.
          if (datmat_(m_ + 1, np) <= kFeasibilityTol) {
            double fmin = datmat_(m_, np), fmax = datmat_(m_, np);
            for (int j = 0; j < n_; ++j) {
              fmin = std::min(fmin, datmat_(m_, j));
              fmax = std::max(fmax, datmat_(m_, j));
            }
            if (fmax - fmin < cfg_.f_tolerance) {
              return;
            }
          }

          step = Step::MainIteration;
          break;
        }
      }
    }
  }

 private:
  void evaluate(const VectorXd& x, double& f, double& resmax, int& nfvals) {
    if (static_cast<int>(bk_.history.size()) >= cfg_.max_evaluations) throw BudgetExhausted{};
    if (static_cast<int>(bk_.history.size()) >= eval_cap_) throw CycleBudgetExhausted{};
    ++nfvals;
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    f = objective_(xs);
    if (!std::isfinite(f)) throw OptimizationError("cobyla: objective returned non-finite value");
    resmax = 0.0;
    for (int k = 0; k < m_; ++k) {
      const double g = constraints_[static_cast<std::size_t>(k)](xs);
      if (!std::isfinite(g)) throw OptimizationError("cobyla: constraint returned non-finite value");
      con_[k] = g;
      resmax = std::max(resmax, -g);
    }
    bk_.record(x, f, resmax);
  }

  // Vertex jdrop moves to dx_ (relative to the pole); refresh simi.
  void update_simplex(int jdrop) {
    const double temp = simi_.row(jdrop).dot(dx_);
    sim_.col(jdrop) = dx_;
    simi_.row(jdrop) /= temp;
    for (int j = 0; j < n_; ++j) {
      if (j == jdrop) continue;
      const double t = simi_.row(j).dot(dx_);
      simi_.row(j) -= t * simi_.row(jdrop);
    }
  }

  const ObjectiveFn& objective_;
  const std::vector<ObjectiveFn>& constraints_;
  const OptimizerConfig& cfg_;
  double rho_begin_;
  int eval_cap_;
  Bookkeeping& bk_;
  int n_;
  int m_;
  VectorXd x_;
  MatrixXd sim_, simi_, datmat_, A_;
  VectorXd b_, con_, dx_, vsig_, veta_, sigbar_;
  double rho_ = 0, parmu_ = 0;
};

}  // namespace

OptResult minimize(const ObjectiveFn& objective, const std::vector<ObjectiveFn>& constraints,
                   std::vector<double> x0, const OptimizerConfig& cfg) {
  cfg.validate();
  if (x0.empty()) throw std::invalid_argument("minimize: empty starting point");
  if (!objective) throw std::invalid_argument("minimize: missing objective");

  Bookkeeping bk;
  // Restarted scheme: each cycle runs the Powell iteration to its radius
  // or objective-change stop; while budget remains and a cycle still
  // improved the best objective by at least f_tolerance, resume from the
  // best point with a tighter initial radius. A fresh simplex there
  // rebuilds the linear models, which recovers runs whose radius
  // collapsed early.
  VectorXd x = Eigen::Map<const VectorXd>(x0.data(), static_cast<long>(x0.size()));
  const int n = static_cast<int>(x0.size());
  double rho_begin = cfg.rho_begin;
  try {
    for (int cycle = 0; cycle < 64; ++cycle) {
      const double before = bk.best_feasible_f();
      // No cycle may monopolize the budget; a stalled cycle is cut off
      // and resumed from its best point with a fresh simplex.
      const int cycle_cap =
          std::min(cfg.max_evaluations,
                   static_cast<int>(bk.history.size()) +
                       std::max(6 * n + 10, cfg.max_evaluations / 2));
      bool cycle_cut = false;
      try {
        Cobyla solver(objective, constraints, x, cfg, rho_begin, cycle_cap, bk);
        solver.run();
      } catch (const CycleBudgetExhausted&) {
        cycle_cut = true;
      }
      const double after = bk.best_feasible_f();
      if (static_cast<int>(bk.history.size()) >= cfg.max_evaluations) break;
      const bool improved = !std::isfinite(before) ||
                            (std::isfinite(after) && before - after >= cfg.f_tolerance);
      if (!improved && !cycle_cut && cycle > 0) break;
      if (!std::isfinite(after) && cycle > 0 && !cycle_cut) break;  // still infeasible
      if (!bk.best_x.empty())
        x = Eigen::Map<const VectorXd>(bk.best_x.data(), static_cast<long>(bk.best_x.size()));
      rho_begin = std::max(0.25 * rho_begin, 10.0 * cfg.rho_end);
    }
  } catch (const BudgetExhausted&) {
    // Best recorded point stands.
  }

  OptResult result;
  result.x_best = bk.best_x;
  result.f_best = bk.best_f;
  result.n_evaluations = static_cast<int>(bk.history.size());
  result.constraint_violation = bk.best_viol <= kFeasibilityTol ? 0.0 : bk.best_viol;
  result.history = std::move(bk.history);
  return result;
}

}  // namespace vqcas
