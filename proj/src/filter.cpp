#include "rfi/filter.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "rfi/errors.hpp"

namespace rfi {

SignalBatch::SignalBatch(Eigen::MatrixXd inputs, Eigen::MatrixXd outputs, double noise)
    : x(std::move(inputs)), y(std::move(outputs)), noise_power(noise) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ParameterError("signal batch: X and Y must have identical dimensions");
  }
  if (x.rows() < 1 || x.cols() < 1) throw ParameterError("signal batch: empty signals");
}

Covariance::Covariance(Eigen::MatrixXd c) : c_(std::move(c)) {
  if (c_.rows() != c_.cols() || c_.rows() < 1) {
    throw ParameterError("covariance must be a non-empty square matrix");
  }
  const double scale = std::max(1.0, c_.cwiseAbs().maxCoeff());
  if ((c_ - c_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ParameterError("covariance must be symmetric");
  }
  c_ = 0.5 * (c_ + c_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw ParameterError("covariance must be positive semidefinite");
  }
}

GraphFilter build_filter(const Gso& s, const FilterCoeffs& coeffs) {
  if (coeffs.h.size() < 1) throw ParameterError("filter needs at least one coefficient");
  const int n = s.n();
  const Eigen::MatrixXd& shift = s.matrix();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd h = coeffs.h(coeffs.order()) * identity;
  for (int k = coeffs.order() - 1; k >= 0; --k) {
    h = shift * h + coeffs.h(k) * identity;
  }
  return {std::move(h), FilterProvenance{FilterOrigin::kPolynomial, coeffs, s}};
}

FilterCoeffs random_coeffs(int k, bool unit_norm, Rng& rng) {
  if (k < 0) throw ParameterError("filter order must be >= 0");
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd h(k + 1);
  do {
    for (int i = 0; i <= k; ++i) h(i) = dist(rng);
  } while (h.squaredNorm() == 0.0);
  if (unit_norm) h /= h.norm();
  return {std::move(h)};
}

Eigen::MatrixXd generate_white_inputs(int n, int m, Rng& rng) {
  if (n < 1 || m < 1) throw ParameterError("signal dimensions must be >= 1");
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd x(n, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) x(i, j) = dist(rng);
  }
  return x;
}

Eigen::MatrixXd add_awgn(const Eigen::MatrixXd& signal, double normalized_power, Rng& rng) {
  if (!(normalized_power >= 0.0)) throw ParameterError("noise power must be >= 0");
  if (normalized_power == 0.0 || signal.size() == 0) return signal;
  const double variance = normalized_power * signal.squaredNorm() / static_cast<double>(signal.size());
  const Eigen::MatrixXd e =
      generate_white_inputs(static_cast<int>(signal.rows()), static_cast<int>(signal.cols()), rng);
  return signal + std::sqrt(variance) * e;
}

SignalBatch generate_io_pairs(const GraphFilter& h, int m, double noise_power, Rng& rng) {
  if (m < 1) throw ParameterError("need at least one signal");
  Eigen::MatrixXd x = generate_white_inputs(h.n(), m, rng);
  Eigen::MatrixXd y = add_awgn(h.matrix * x, noise_power, rng);
  return SignalBatch(std::move(x), std::move(y), noise_power);
}

GraphFilter sem_filter(const Gso& s) {
  const int n = s.n();
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - s.matrix();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(system);
  const double smallest = svd.singularValues()(n - 1);
  if (smallest <= 1e-10) {
    std::ostringstream msg;
    msg << "sem_filter: I - S is singular (smallest singular value " << smallest << ")";
    throw SingularityError(msg.str());
  }
  Eigen::MatrixXd h = system.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
  return {std::move(h), FilterProvenance{FilterOrigin::kSem, std::nullopt, s}};
}

Covariance sample_covariance(const Eigen::MatrixXd& y) {
  if (y.cols() < 1) throw ParameterError("sample covariance needs at least one signal");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(y.rows(), y.rows());
  c.selfadjointView<Eigen::Lower>().rankUpdate(y, 1.0 / static_cast<double>(y.cols()));
  c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
  return Covariance(std::move(c));
}

Covariance output_covariance(const Eigen::MatrixXd& h, double noise_variance) {
  Eigen::MatrixXd c = h * h.transpose();
  c.diagonal().array() += noise_variance;
  return Covariance(0.5 * (c + c.transpose()));
}

double commutation_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw ParameterError("commutation_residual needs two square matrices of equal size");
  }
  return (a * b - b * a).norm();
}

void write_signal_batch(std::ostream& os, const SignalBatch& batch) {
  write_matrix(os, batch.x);
  write_matrix(os, batch.y);
}

SignalBatch read_signal_batch(std::istream& is) {
  Eigen::MatrixXd x = read_matrix(is);
  Eigen::MatrixXd y = read_matrix(is);
  return SignalBatch(std::move(x), std::move(y));
}

}  // namespace rfi
