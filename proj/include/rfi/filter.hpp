#pragma once

#include <iosfwd>
#include <optional>

#include <Eigen/Dense>

#include "rfi/graph.hpp"

namespace rfi {

/// Polynomial filter coefficients h_0 ... h_K.
struct FilterCoeffs {
  Eigen::VectorXd h;

  int order() const { return static_cast<int>(h.size()) - 1; }
};

enum class FilterOrigin {
  kPolynomial,  // sum_k h_k S^k
  kSem,         // (I - S)^-1
};

struct FilterProvenance {
  FilterOrigin origin = FilterOrigin::kPolynomial;
  std::optional<FilterCoeffs> coeffs;
  Gso source;
};

/// Dense filter matrix, optionally tagged with how it was generated. A filter with
/// provenance commutes with its source GSO up to roundoff.
struct GraphFilter {
  Eigen::MatrixXd matrix;
  std::optional<FilterProvenance> provenance;

  int n() const { return static_cast<int>(matrix.rows()); }
};

/// Paired inputs and outputs, one signal per column.
struct SignalBatch {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  double noise_power = 0.0;

  SignalBatch(Eigen::MatrixXd inputs, Eigen::MatrixXd outputs, double noise = 0.0);

  int n() const { return static_cast<int>(x.rows()); }
  int m() const { return static_cast<int>(x.cols()); }
};

/// Symmetric positive semidefinite covariance matrix. The constructor symmetrizes and
/// rejects matrices that are not PSD up to numerical tolerance.
class Covariance {
 public:
  explicit Covariance(Eigen::MatrixXd c);

  const Eigen::MatrixXd& matrix() const { return c_; }
  int n() const { return static_cast<int>(c_.rows()); }

 private:
  Eigen::MatrixXd c_;
};

/// H = sum_k h_k S^k by Horner accumulation.
GraphFilter build_filter(const Gso& s, const FilterCoeffs& coeffs);

/// i.i.d. uniform [-1, 1] coefficients, optionally rescaled to unit 2-norm.
FilterCoeffs random_coeffs(int k, bool unit_norm, Rng& rng);

/// n x m matrix of i.i.d. standard normal entries.
Eigen::MatrixXd generate_white_inputs(int n, int m, Rng& rng);

/// Adds white Gaussian noise with total energy normalized_power times the signal
/// energy in expectation (per-entry variance = power * ||signal||_F^2 / (n m)).
Eigen::MatrixXd add_awgn(const Eigen::MatrixXd& signal, double normalized_power, Rng& rng);

/// White inputs X and outputs Y = H X + AWGN (noise on Y only).
SignalBatch generate_io_pairs(const GraphFilter& h, int m, double noise_power, Rng& rng);

/// H = (I - S)^-1; throws SingularityError when I - S is numerically singular.
GraphFilter sem_filter(const Gso& s);

/// (1/m) Y Y^T, zero-mean convention.
Covariance sample_covariance(const Eigen::MatrixXd& y);

/// Ensemble covariance of Y = H X + noise for white X: H H^T + sigma^2 I.
Covariance output_covariance(const Eigen::MatrixXd& h, double noise_variance);

/// ||A B - B A||_F
double commutation_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

void write_signal_batch(std::ostream& os, const SignalBatch& batch);
SignalBatch read_signal_batch(std::istream& is);

}  // namespace rfi
