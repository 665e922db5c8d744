#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rfi/config.hpp"
#include "rfi/filter.hpp"
#include "rfi/graph.hpp"

namespace rfi {

/// Output of every estimator: denoised GSO, filter estimate and diagnostics.
struct RfiResult {
  Gso s_hat;
  GraphFilter h_hat;
  /// Joint objective after each outer iteration, evaluated at that iteration's gamma.
  std::vector<double> objective_trajectory;
  int outer_iters = 0;
  bool converged = false;
  /// False when any graph-denoising call hit its inner iteration cap.
  bool inner_converged = true;
};

/// ||Y - H X||_F^2 + lambda ||S - S_bar||_1 + beta ||S||_1 + gamma ||S H - H S||_F^2
double objective_eval(const Eigen::MatrixXd& s, const Eigen::MatrixXd& h, const Gso& s_bar,
                      const SignalBatch& batch, const RfiConfig& cfg, double gamma);

/// 1e-8 trace(X X^T (x) I) / n^2 = 1e-8 ||X||_F^2 / n.
double default_ridge(const SignalBatch& batch);
double resolve_ridge(const RfiConfig& cfg, const SignalBatch& batch);

/// Filter identification for a fixed GSO estimate:
///   argmin_H ||Y - H X||_F^2 + gamma ||S H - H S||_F^2 + ridge ||H||_F^2,
/// solved as the dense n^2 x n^2 Kronecker system
///   (X X^T (x) I + gamma (S S^T (x) I + I (x) S^T S - S^T (x) S^T - S (x) S) + ridge I) vec(H)
///     = (X (x) I) vec(Y).
/// `s_hat` need not be a valid GSO (RFI-R passes a covariance). Throws SingularityError
/// when the system is not positive definite.
GraphFilter filter_id_step(const Eigen::MatrixXd& s_hat, const SignalBatch& batch, double gamma,
                           double ridge);

/// argmin_s lambda |s - anchor| + beta |s| + (s - v)^2 / (2 step), in closed form.
double prox_double_l1(double v, double step, double lambda, double beta, double anchor);

struct DenoiseResult {
  Gso s_hat;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;
};

/// Optional inputs of the graph-denoising step.
struct DenoiseOptions {
  std::optional<Covariance> cov_y;
  std::optional<Covariance> cov_x;
  /// Starting point; defaults to the projection of S_bar. Used by the alternating
  /// solver so that each denoising call starts from the previous estimate.
  std::optional<Eigen::MatrixXd> warm_start;
};

/// Smooth part of the denoising objective: a weighted sum of commutation penalties
/// w ||S B - B S||_F^2. Exposed so that tests can evaluate the exact objective.
double denoise_objective(const Eigen::MatrixXd& s, const Eigen::MatrixXd& h_hat, const Gso& s_bar,
                         const RfiConfig& cfg, double gamma, const DenoiseOptions& opts = {});

/// Graph denoising:
///   argmin_{S in cset} lambda ||S - S_bar||_1 + beta ||S||_1 + gamma ||S H - H S||_F^2
///                      + w_y ||C_Y S - S C_Y||_F^2 + w_x ||C_X S - S C_X||_F^2
/// by monotone accelerated proximal gradient with step step_scale / L. `cset` must
/// zero the diagonal so the result is an adjacency GSO.
DenoiseResult graph_denoise_step(const Eigen::MatrixXd& h_hat, const Gso& s_bar,
                                 const GsoConstraintSet& cset, const RfiConfig& cfg, double gamma,
                                 const DenoiseOptions& opts = {});

/// Non-robust filter identification trusting S_bar.
GraphFilter fi_baseline(const Gso& s_bar, const SignalBatch& batch, double gamma, double ridge);

/// Alternating minimization of the joint objective, starting from S_hat = S_bar.
RfiResult rfi_iter(const Gso& s_bar, const SignalBatch& batch, const GsoConstraintSet& cset,
                   const RfiConfig& cfg);

/// Two-step variant: denoise with gamma = 0 and stationarity penalties, then identify
/// the filter against the denoised GSO with gamma at the schedule cap.
RfiResult rfi_d(const Gso& s_bar, const SignalBatch& batch, const GsoConstraintSet& cset,
                const RfiConfig& cfg, const Covariance& cov_y,
                const std::optional<Covariance>& cov_x = std::nullopt);

/// Convex variant: the bilinear commutation term is replaced by commutation with C_Y
/// in both the filter step and the graph step, which become independent.
RfiResult rfi_r(const Gso& s_bar, const SignalBatch& batch, const GsoConstraintSet& cset,
                const RfiConfig& cfg, const Covariance& cov_y);

struct TlsSemConfig {
  double alpha = 0.1;         // l1 weight on the perturbation
  double model_weight = 1.0;  // weight of the structural equation residual
  int max_iters = 100;
  double tol = 1e-6;
  InnerConfig inner;
};

/// Structural-equation baseline. Alternates between clean signals Y_c given Delta,
///   argmin_Yc ||Y - Y_c||^2 + mu ||(I - S_bar + Delta) Y_c - X||^2,
/// and a zero-diagonal lasso on Delta given Y_c,
///   argmin_Delta mu ||Delta Y_c - (X - (I - S_bar) Y_c)||^2 + alpha ||Delta||_1.
/// Returns S_hat = S_bar - Delta and H_hat = (I - S_hat)^-1.
RfiResult tls_sem_baseline(const Gso& s_bar, const SignalBatch& batch, const TlsSemConfig& cfg);

/// Structured text report (JSON) with the objective trajectory and both estimates.
void write_report(std::ostream& os, const RfiResult& result);

}  // namespace rfi
