#include "prox_gradient.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rfi::detail {

CompositeResult minimize_composite(const CompositeProblem& problem, Eigen::MatrixXd x0,
                                   double lipschitz, const InnerConfig& cfg) {
  const double step = lipschitz > 0.0 ? cfg.step_scale / lipschitz : 1.0;
  auto total = [&](const Eigen::MatrixXd& m) { return problem.smooth(m) + problem.nonsmooth(m); };

  CompositeResult out;
  out.x = std::move(x0);
  out.objective = total(out.x);
  Eigen::MatrixXd y = out.x;
  double t = 1.0;
  bool at_restart = true;

  for (int k = 1; k <= cfg.max_iters; ++k) {
    out.iterations = k;
    const Eigen::MatrixXd z = problem.prox(y - step * problem.gradient(y), step);
    const double fz = total(z);
    if (fz <= out.objective) {
      const double change = (z - out.x).norm() / std::max(1.0, out.x.norm());
      const Eigen::MatrixXd previous = std::move(out.x);
      out.x = z;
      out.objective = fz;
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = out.x + ((t - 1.0) / t_next) * (out.x - previous);
      t = t_next;
      at_restart = false;
      if (change <= cfg.tol) {
        out.converged = true;
        break;
      }
    } else if (at_restart) {
      // A plain proximal step from x failed to descend: x is stationary up to roundoff.
      out.converged = true;
      break;
    } else {
      y = out.x;
      t = 1.0;
      at_restart = true;
    }
  }
  return out;
}

double power_iteration(const MatrixFn& op, Eigen::Index rows, Eigen::Index cols, int iters) {
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd v(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) v(i, j) = dist(rng);
  }
  v /= v.norm();
  double estimate = 0.0;
  for (int k = 0; k < iters; ++k) {
    Eigen::MatrixXd w = op(v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    estimate = norm;
    v = w / norm;
  }
  return estimate;
}

}  // namespace rfi::detail
