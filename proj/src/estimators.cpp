#include <cmath>
#include <limits>
#include <ostream>

#include "rfi/errors.hpp"
#include "rfi/solvers.hpp"

namespace rfi {

double objective_eval(const Eigen::MatrixXd& s, const Eigen::MatrixXd& h, const Gso& s_bar,
                      const SignalBatch& batch, const RfiConfig& cfg, double gamma) {
  const int n = s_bar.n();
  if (s.rows() != n || s.cols() != n || h.rows() != n || h.cols() != n || batch.n() != n) {
    throw ParameterError("objective_eval: dimension mismatch");
  }
  const double fit = (batch.y - h * batch.x).squaredNorm();
  const double perturbation = (s - s_bar.matrix()).cwiseAbs().sum();
  const double sparsity = s.cwiseAbs().sum();
  const double commutation = (s * h - h * s).squaredNorm();
  return fit + cfg.lambda * perturbation + cfg.beta * sparsity + gamma * commutation;
}

RfiResult rfi_iter(const Gso& s_bar, const SignalBatch& batch, const GsoConstraintSet& cset,
                   const RfiConfig& cfg) {
  cfg.validate();
  if (batch.n() != s_bar.n()) throw ParameterError("rfi_iter: signal/GSO dimension mismatch");
  const double ridge = resolve_ridge(cfg, batch);

  Eigen::MatrixXd s = s_bar.matrix();
  std::optional<Gso> s_hat;
  GraphFilter h;
  RfiResult result{s_bar, {}, {}, 0, false, true};
  double previous_gamma = std::numeric_limits<double>::quiet_NaN();

  for (int t = 0; t < cfg.max_outer_iters; ++t) {
    const double gamma = cfg.gamma_schedule.at(t);
    h = filter_id_step(s, batch, gamma, ridge);

    DenoiseOptions opts;
    opts.warm_start = s;
    DenoiseResult denoised = graph_denoise_step(h.matrix, s_bar, cset, cfg, gamma, opts);
    result.inner_converged = result.inner_converged && denoised.converged;
    s = denoised.s_hat.matrix();
    s_hat = std::move(denoised.s_hat);

    const double f = objective_eval(s, h.matrix, s_bar, batch, cfg, gamma);
    result.objective_trajectory.push_back(f);
    result.outer_iters = t + 1;
    if (t > 0 && gamma == previous_gamma) {
      const double f_prev = result.objective_trajectory[t - 1];
      const double scale = std::max(std::abs(f_prev), std::numeric_limits<double>::min());
      if (std::abs(f - f_prev) <= cfg.outer_tol * scale) {
        result.converged = true;
        break;
      }
    }
    previous_gamma = gamma;
  }
  result.s_hat = std::move(*s_hat);
  result.h_hat = std::move(h);
  return result;
}

RfiResult rfi_d(const Gso& s_bar, const SignalBatch& batch, const GsoConstraintSet& cset,
                const RfiConfig& cfg, const Covariance& cov_y,
                const std::optional<Covariance>& cov_x) {
  cfg.validate();
  const int n = s_bar.n();
  if (batch.n() != n) throw ParameterError("rfi_d: signal/GSO dimension mismatch");

  DenoiseOptions opts;
  opts.cov_y = cov_y;
  opts.cov_x = cov_x;
  DenoiseResult denoised =
      graph_denoise_step(Eigen::MatrixXd::Zero(n, n), s_bar, cset, cfg, 0.0, opts);

  const double gamma = cfg.gamma_schedule.cap;
  GraphFilter h = filter_id_step(denoised.s_hat.matrix(), batch, gamma, resolve_ridge(cfg, batch));
  const double f = objective_eval(denoised.s_hat.matrix(), h.matrix, s_bar, batch, cfg, gamma);
  return {std::move(denoised.s_hat), std::move(h), {f}, 1, true, denoised.converged};
}

RfiResult rfi_r(const Gso& s_bar, const SignalBatch& batch, const GsoConstraintSet& cset,
                const RfiConfig& cfg, const Covariance& cov_y) {
  cfg.validate();
  if (batch.n() != s_bar.n() || cov_y.n() != s_bar.n()) {
    throw ParameterError("rfi_r: dimension mismatch");
  }
  const double gamma = cfg.gamma_schedule.cap;
  const Eigen::MatrixXd& c = cov_y.matrix();

  GraphFilter h = filter_id_step(c, batch, gamma, resolve_ridge(cfg, batch));
  // The covariance stands in for the filter in the graph step's commutation term.
  DenoiseResult denoised = graph_denoise_step(c, s_bar, cset, cfg, gamma);

  const double f = objective_eval(denoised.s_hat.matrix(), h.matrix, s_bar, batch, cfg, gamma);
  return {std::move(denoised.s_hat), std::move(h), {f}, 1, true, denoised.converged};
}

void write_report(std::ostream& os, const RfiResult& result) {
  auto rows = [](const Eigen::MatrixXd& m) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::vector<double> row(m.cols());
      for (Eigen::Index j = 0; j < m.cols(); ++j) row[j] = m(i, j);
      out.push_back(row);
    }
    return out;
  };
  nlohmann::json j{{"outer_iters", result.outer_iters},
                   {"converged", result.converged},
                   {"inner_converged", result.inner_converged},
                   {"objective_trajectory", result.objective_trajectory},
                   {"s_hat", rows(result.s_hat.matrix())},
                   {"h_hat", rows(result.h_hat.matrix)}};
  os << j.dump(2) << '\n';
}

}  // namespace rfi
