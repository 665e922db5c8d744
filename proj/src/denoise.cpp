#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "prox_gradient.hpp"
#include "rfi/errors.hpp"
#include "rfi/solvers.hpp"

namespace rfi {

namespace {

struct CommutationTerm {
  const Eigen::MatrixXd* b;
  double weight;
};

std::vector<CommutationTerm> smooth_terms(const Eigen::MatrixXd& h_hat, double gamma,
                                          const RfiConfig& cfg, const DenoiseOptions& opts) {
  std::vector<CommutationTerm> terms;
  if (gamma > 0.0) terms.push_back({&h_hat, gamma});
  if (opts.cov_y && cfg.stationarity_weight_y > 0.0) {
    terms.push_back({&opts.cov_y->matrix(), cfg.stationarity_weight_y});
  }
  if (opts.cov_x && cfg.stationarity_weight_x > 0.0) {
    terms.push_back({&opts.cov_x->matrix(), cfg.stationarity_weight_x});
  }
  return terms;
}

double smooth_value(const std::vector<CommutationTerm>& terms, const Eigen::MatrixXd& s) {
  double value = 0.0;
  for (const auto& t : terms) value += t.weight * (s * *t.b - *t.b * s).squaredNorm();
  return value;
}

// d/dS w ||S B - B S||^2 = 2 w (R B^T - B^T R), R = S B - B S.
Eigen::MatrixXd smooth_gradient(const std::vector<CommutationTerm>& terms, const Eigen::MatrixXd& s) {
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(s.rows(), s.cols());
  for (const auto& t : terms) {
    const Eigen::MatrixXd& b = *t.b;
    const Eigen::MatrixXd r = s * b - b * s;
    grad.noalias() += 2.0 * t.weight * (r * b.transpose() - b.transpose() * r);
  }
  return grad;
}

double lipschitz_constant(const std::vector<CommutationTerm>& terms, Eigen::Index n) {
  if (terms.empty()) return 0.0;
  // ||S B - B S||_F <= 2 ||B||_2 ||S||_F bounds the operator norm from above.
  double bound = 0.0;
  for (const auto& t : terms) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(*t.b);
    const double norm2 = svd.singularValues()(0);
    bound += 2.0 * t.weight * 4.0 * norm2 * norm2;
  }
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(n, n);
  const double estimate = detail::power_iteration(
      [&](const Eigen::MatrixXd& v) { return smooth_gradient(terms, v); }, n, n);
  return std::min(bound, 1.05 * estimate);
}

}  // namespace

double prox_double_l1(double v, double step, double lambda, double beta, double anchor) {
  const double lo = std::min(0.0, anchor);
  const double hi = std::max(0.0, anchor);
  auto phi = [&](double s) {
    return lambda * std::abs(s - anchor) + beta * std::abs(s) + (s - v) * (s - v) / (2.0 * step);
  };
  // Stationary points of each smooth piece, kept only when inside their region;
  // the breakpoints cover the kinks. The function is convex, so the best candidate wins.
  std::array<double, 5> candidates{lo, hi, lo, hi, lo};
  int count = 2;
  const double left = v + step * (lambda + beta);
  if (left < lo) candidates[count++] = left;
  const double right = v - step * (lambda + beta);
  if (right > hi) candidates[count++] = right;
  if (anchor != 0.0) {
    // Between 0 and the anchor the two terms pull in opposite directions.
    const double sign = anchor > 0.0 ? 1.0 : -1.0;
    const double middle = v + sign * step * (lambda - beta);
    if (middle > lo && middle < hi) candidates[count++] = middle;
  }
  double best = candidates[0];
  double best_value = phi(best);
  for (int i = 1; i < count; ++i) {
    const double value = phi(candidates[i]);
    if (value < best_value) {
      best = candidates[i];
      best_value = value;
    }
  }
  return best;
}

double denoise_objective(const Eigen::MatrixXd& s, const Eigen::MatrixXd& h_hat, const Gso& s_bar,
                         const RfiConfig& cfg, double gamma, const DenoiseOptions& opts) {
  const auto terms = smooth_terms(h_hat, gamma, cfg, opts);
  return cfg.lambda * (s - s_bar.matrix()).cwiseAbs().sum() + cfg.beta * s.cwiseAbs().sum() +
         smooth_value(terms, s);
}

DenoiseResult graph_denoise_step(const Eigen::MatrixXd& h_hat, const Gso& s_bar,
                                 const GsoConstraintSet& cset, const RfiConfig& cfg, double gamma,
                                 const DenoiseOptions& opts) {
  cfg.validate();
  const int n = s_bar.n();
  if (h_hat.rows() != n || h_hat.cols() != n) {
    throw ParameterError("graph_denoise_step: filter estimate does not match the GSO dimension");
  }
  if (!(gamma >= 0.0)) throw ParameterError("graph_denoise_step: gamma must be >= 0");
  if (!cset.zero_diagonal) {
    throw ParameterError("graph_denoise_step: the admissible set must zero the diagonal");
  }
  for (const auto* cov : {&opts.cov_y, &opts.cov_x}) {
    if (cov->has_value() && (*cov)->n() != n) {
      throw ParameterError("graph_denoise_step: covariance dimension mismatch");
    }
  }

  const Eigen::MatrixXd& anchor = s_bar.matrix();
  const auto terms = smooth_terms(h_hat, gamma, cfg, opts);

  detail::CompositeProblem problem;
  problem.smooth = [&](const Eigen::MatrixXd& s) { return smooth_value(terms, s); };
  problem.gradient = [&](const Eigen::MatrixXd& s) { return smooth_gradient(terms, s); };
  problem.nonsmooth = [&](const Eigen::MatrixXd& s) {
    return cfg.lambda * (s - anchor).cwiseAbs().sum() + cfg.beta * s.cwiseAbs().sum();
  };
  problem.prox = [&](const Eigen::MatrixXd& v, double step) {
    // For a symmetric set, averaging the pair first makes the entrywise prox exact on
    // the coupled (i, j)/(j, i) variables; the remaining box and diagonal constraints
    // are 1-D clamps of the unconstrained prox.
    const Eigen::MatrixXd w = cset.symmetric ? Eigen::MatrixXd(0.5 * (v + v.transpose())) : v;
    Eigen::MatrixXd out(n, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        out(i, j) = prox_double_l1(w(i, j), step, cfg.lambda, cfg.beta, anchor(i, j));
      }
    }
    return project_onto_constraints(out, cset);
  };

  Eigen::MatrixXd start = opts.warm_start ? *opts.warm_start : anchor;
  if (start.rows() != n || start.cols() != n) {
    throw ParameterError("graph_denoise_step: warm start dimension mismatch");
  }
  start = project_onto_constraints(start, cset);

  const double lipschitz = lipschitz_constant(terms, n);
  detail::CompositeResult solved =
      detail::minimize_composite(problem, std::move(start), lipschitz, cfg.inner);

  return {Gso::adjacency(std::move(solved.x), !cset.symmetric, true), solved.converged,
          solved.iterations, solved.objective};
}

}  // namespace rfi
