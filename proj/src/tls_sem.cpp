#include <cmath>
#include <sstream>

#include "prox_gradient.hpp"
#include "rfi/errors.hpp"
#include "rfi/solvers.hpp"

namespace rfi {

namespace {

void require_invertible(const Eigen::MatrixXd& m, const char* what) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const double smallest = svd.singularValues()(m.rows() - 1);
  if (!(smallest > 1e-10)) {
    std::ostringstream msg;
    msg << "tls_sem_baseline: " << what << " is singular (smallest singular value " << smallest
        << ")";
    throw SingularityError(msg.str());
  }
}

}  // namespace

RfiResult tls_sem_baseline(const Gso& s_bar, const SignalBatch& batch, const TlsSemConfig& cfg) {
  const int n = s_bar.n();
  if (batch.n() != n) throw ParameterError("tls_sem_baseline: signal/GSO dimension mismatch");
  if (s_bar.kind() != GsoKind::kAdjacency) {
    throw ParameterError("tls_sem_baseline: the structural equation model needs an adjacency GSO");
  }
  if (!(cfg.alpha >= 0.0) || !(cfg.model_weight > 0.0) || cfg.max_iters < 1 || !(cfg.tol > 0.0)) {
    throw ParameterError("tls_sem_baseline: invalid configuration");
  }
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd base = eye - s_bar.matrix();
  const Eigen::MatrixXd& x = batch.x;
  const Eigen::MatrixXd& y = batch.y;
  const double mu = cfg.model_weight;

  const bool undirected = !s_bar.directed();
  const bool nonnegative = s_bar.matrix().minCoeff() >= 0.0;

  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(n, n);
  RfiResult result{s_bar, {}, {}, 0, false, true};

  for (int it = 0; it < cfg.max_iters; ++it) {
    // Clean signals: (I + mu B^T B) Y_c = Y + mu B^T X.
    const Eigen::MatrixXd b = base + delta;
    require_invertible(b, "I - S_bar + Delta");
    const Eigen::MatrixXd normal = eye + mu * b.transpose() * b;
    const Eigen::MatrixXd yc = normal.llt().solve(y + mu * b.transpose() * x);

    // Perturbation: zero-diagonal lasso on Delta Y_c = X - (I - S_bar) Y_c.
    const Eigen::MatrixXd target = x - base * yc;
    const Eigen::MatrixXd gram = yc * yc.transpose();
    const Eigen::MatrixXd target_yct = target * yc.transpose();
    detail::CompositeProblem problem;
    problem.smooth = [&](const Eigen::MatrixXd& d) { return mu * (d * yc - target).squaredNorm(); };
    problem.gradient = [&](const Eigen::MatrixXd& d) {
      return Eigen::MatrixXd(2.0 * mu * (d * gram - target_yct));
    };
    problem.nonsmooth = [&](const Eigen::MatrixXd& d) { return cfg.alpha * d.cwiseAbs().sum(); };
    // Feasible set: zero diagonal, symmetric for undirected graphs, and S_bar - Delta >= 0
    // for nonnegative graphs. Each entry's prox is a clamped soft threshold.
    problem.prox = [&](const Eigen::MatrixXd& v, double step) {
      const Eigen::MatrixXd w = undirected ? Eigen::MatrixXd(0.5 * (v + v.transpose())) : v;
      Eigen::MatrixXd out(n, n);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const double d = prox_double_l1(w(i, j), step, 0.0, cfg.alpha, 0.0);
          out(i, j) = nonnegative ? std::min(d, s_bar.matrix()(i, j)) : d;
        }
      }
      out.diagonal().setZero();
      return out;
    };
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lipschitz = 2.0 * mu * eig.eigenvalues().maxCoeff();
    detail::CompositeResult solved = detail::minimize_composite(problem, delta, lipschitz, cfg.inner);
    result.inner_converged = result.inner_converged && solved.converged;

    const double change = (solved.x - delta).norm() / std::max(1.0, delta.norm());
    delta = std::move(solved.x);
    result.objective_trajectory.push_back((y - yc).squaredNorm() +
                                          mu * ((base + delta) * yc - x).squaredNorm() +
                                          cfg.alpha * delta.cwiseAbs().sum());
    result.outer_iters = it + 1;
    if (change < cfg.tol) {
      result.converged = true;
      break;
    }
  }

  const bool symmetric = s_bar.matrix() == s_bar.matrix().transpose() && delta == delta.transpose();
  Gso s_hat = Gso::adjacency(s_bar.matrix() - delta, !symmetric, true);
  require_invertible(eye - s_hat.matrix(), "I - S_hat");
  GraphFilter h = sem_filter(s_hat);
  result.s_hat = std::move(s_hat);
  result.h_hat = std::move(h);
  return result;
}

}  // namespace rfi
