#include <sstream>

#include "rfi/errors.hpp"
#include "rfi/solvers.hpp"

namespace rfi {

namespace {

// Accumulates scale * (a (x) b) into out.
void add_kron(Eigen::MatrixXd& out, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
              double scale) {
  const Eigen::Index p = b.rows();
  const Eigen::Index q = b.cols();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double aij = scale * a(i, j);
      if (aij != 0.0) out.block(i * p, j * q, p, q).noalias() += aij * b;
    }
  }
}

}  // namespace

double default_ridge(const SignalBatch& batch) {
  return 1e-8 * batch.x.squaredNorm() / static_cast<double>(batch.n());
}

double resolve_ridge(const RfiConfig& cfg, const SignalBatch& batch) {
  return cfg.ridge ? *cfg.ridge : default_ridge(batch);
}

GraphFilter filter_id_step(const Eigen::MatrixXd& s_hat, const SignalBatch& batch, double gamma,
                           double ridge) {
  const int n = batch.n();
  if (s_hat.rows() != n || s_hat.cols() != n) {
    throw ParameterError("filter_id_step: GSO estimate does not match the signal dimension");
  }
  if (!(gamma >= 0.0)) throw ParameterError("filter_id_step: gamma must be >= 0");
  if (!(ridge >= 0.0)) throw ParameterError("filter_id_step: ridge must be >= 0");

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd xxt = batch.x * batch.x.transpose();
  const int dim = n * n;
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(dim, dim);
  add_kron(system, xxt, eye, 1.0);
  if (gamma > 0.0) {
    const Eigen::MatrixXd st = s_hat.transpose();
    add_kron(system, s_hat * st, eye, gamma);
    add_kron(system, eye, st * s_hat, gamma);
    add_kron(system, st, st, -gamma);
    add_kron(system, s_hat, s_hat, -gamma);
  }
  system.diagonal().array() += ridge;

  // (X (x) I) vec(Y) = vec(Y X^T)
  const Eigen::MatrixXd yxt = batch.y * batch.x.transpose();
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(yxt.data(), dim);

  Eigen::LLT<Eigen::MatrixXd> llt(system);
  const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
  if (!(rcond > 1e-14)) {
    std::ostringstream msg;
    msg << "filter_id_step: Kronecker system is singular (rcond " << rcond
        << "); use a positive ridge";
    throw SingularityError(msg.str());
  }
  const Eigen::VectorXd vec_h = llt.solve(rhs);
  return {Eigen::Map<const Eigen::MatrixXd>(vec_h.data(), n, n), std::nullopt};
}

GraphFilter fi_baseline(const Gso& s_bar, const SignalBatch& batch, double gamma, double ridge) {
  return filter_id_step(s_bar.matrix(), batch, gamma, ridge);
}

}  // namespace rfi
