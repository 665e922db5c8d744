#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "rfi/graph.hpp"

namespace rfi {

/// gamma_t = min(cap, initial * growth^t). initial == cap pins gamma.
struct GammaSchedule {
  double initial = 0.01;
  double growth = 10.0;
  double cap = 100.0;

  double at(int outer_iter) const;
  bool pinned() const { return initial >= cap || growth == 1.0; }
  static GammaSchedule fixed(double gamma) { return {gamma, 1.0, gamma}; }
};

/// Proximal-gradient settings for the graph-denoising step.
struct InnerConfig {
  double step_scale = 1.0;  // step = step_scale / L, L the smooth-term Lipschitz constant
  int max_iters = 5000;
  double tol = 1e-9;
};

struct RfiConfig {
  double lambda = 1.0;
  double beta = 0.1;
  GammaSchedule gamma_schedule;
  double stationarity_weight_x = 0.0;
  double stationarity_weight_y = 1.0;
  int max_outer_iters = 50;
  double outer_tol = 1e-4;
  InnerConfig inner;
  /// Diagonal regularizer of the Kronecker system; unset means 1e-8 ||X||_F^2 / n.
  std::optional<double> ridge;

  void validate() const;
};

void to_json(nlohmann::json& j, const GammaSchedule& g);
void from_json(const nlohmann::json& j, GammaSchedule& g);
void to_json(nlohmann::json& j, const InnerConfig& c);
void from_json(const nlohmann::json& j, InnerConfig& c);
void to_json(nlohmann::json& j, const RfiConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, RfiConfig& c);

void to_json(nlohmann::json& j, const GsoConstraintSet& c);
void from_json(const nlohmann::json& j, GsoConstraintSet& c);

RfiConfig load_rfi_config(const std::string& path);

}  // namespace rfi
