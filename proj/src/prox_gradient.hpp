#pragma once

#include <functional>

#include <Eigen/Dense>

#include "rfi/config.hpp"

namespace rfi::detail {

using MatrixFn = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

/// min_x g(x) + h(x) with g smooth (L-Lipschitz gradient) and h prox-friendly.
/// `prox(v, t)` must return argmin_x h(x) + ||x - v||^2 / (2 t) over the feasible set.
struct CompositeProblem {
  std::function<double(const Eigen::MatrixXd&)> smooth;
  MatrixFn gradient;
  std::function<double(const Eigen::MatrixXd&)> nonsmooth;
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&, double)> prox;
};

struct CompositeResult {
  Eigen::MatrixXd x;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Accelerated proximal gradient with a monotone safeguard: a candidate is accepted
/// only if it does not increase the objective, otherwise momentum restarts. The
/// objective therefore never exceeds its value at the (feasible) starting point.
CompositeResult minimize_composite(const CompositeProblem& problem, Eigen::MatrixXd x0,
                                   double lipschitz, const InnerConfig& cfg);

/// Largest eigenvalue of a symmetric PSD linear operator on rows x cols matrices.
double power_iteration(const MatrixFn& op, Eigen::Index rows, Eigen::Index cols, int iters = 100);

}  // namespace rfi::detail
