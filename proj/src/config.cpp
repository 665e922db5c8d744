#include "rfi/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>

#include "rfi/errors.hpp"

namespace rfi {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* what) {
  if (!j.is_object()) throw ParameterError(std::string(what) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) throw ParameterError(std::string(what) + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      j.at(key).get_to(out);
    } catch (const json::exception& e) {
      throw ParameterError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

}  // namespace

double GammaSchedule::at(int outer_iter) const {
  if (pinned()) return cap;
  return std::min(cap, initial * std::pow(growth, outer_iter));
}

void RfiConfig::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError(std::string(name) + " must be >= 0");
  };
  nonneg(lambda, "lambda");
  nonneg(beta, "beta");
  nonneg(gamma_schedule.initial, "gamma_schedule.initial");
  nonneg(gamma_schedule.cap, "gamma_schedule.cap");
  if (!(gamma_schedule.growth >= 1.0)) throw ParameterError("gamma_schedule.growth must be >= 1");
  nonneg(stationarity_weight_x, "stationarity_weight_x");
  nonneg(stationarity_weight_y, "stationarity_weight_y");
  if (max_outer_iters < 1) throw ParameterError("max_outer_iters must be >= 1");
  if (!(outer_tol > 0.0)) throw ParameterError("outer_tol must be > 0");
  if (!(inner.step_scale > 0.0 && inner.step_scale <= 1.0)) {
    throw ParameterError("inner.step_scale must lie in (0, 1]");
  }
  if (inner.max_iters < 1) throw ParameterError("inner.max_iters must be >= 1");
  if (!(inner.tol > 0.0)) throw ParameterError("inner.tol must be > 0");
  if (ridge) nonneg(*ridge, "ridge");
}

void to_json(json& j, const GammaSchedule& g) {
  j = json{{"initial", g.initial}, {"growth", g.growth}, {"cap", g.cap}};
}

void from_json(const json& j, GammaSchedule& g) {
  reject_unknown(j, {"initial", "growth", "cap"}, "gamma_schedule");
  read_if(j, "initial", g.initial);
  read_if(j, "growth", g.growth);
  read_if(j, "cap", g.cap);
}

void to_json(json& j, const InnerConfig& c) {
  j = json{{"step_scale", c.step_scale}, {"max_iters", c.max_iters}, {"tol", c.tol}};
}

void from_json(const json& j, InnerConfig& c) {
  reject_unknown(j, {"step_scale", "max_iters", "tol"}, "inner");
  read_if(j, "step_scale", c.step_scale);
  read_if(j, "max_iters", c.max_iters);
  read_if(j, "tol", c.tol);
}

void to_json(json& j, const RfiConfig& c) {
  j = json{{"lambda", c.lambda},
           {"beta", c.beta},
           {"gamma_schedule", c.gamma_schedule},
           {"stationarity_weight_x", c.stationarity_weight_x},
           {"stationarity_weight_y", c.stationarity_weight_y},
           {"max_outer_iters", c.max_outer_iters},
           {"outer_tol", c.outer_tol},
           {"inner", c.inner},
           {"ridge", c.ridge ? json(*c.ridge) : json(nullptr)}};
}

void from_json(const json& j, RfiConfig& c) {
  reject_unknown(j,
                 {"lambda", "beta", "gamma_schedule", "stationarity_weight_x",
                  "stationarity_weight_y", "max_outer_iters", "outer_tol", "inner", "ridge"},
                 "solver config");
  read_if(j, "lambda", c.lambda);
  read_if(j, "beta", c.beta);
  read_if(j, "gamma_schedule", c.gamma_schedule);
  read_if(j, "stationarity_weight_x", c.stationarity_weight_x);
  read_if(j, "stationarity_weight_y", c.stationarity_weight_y);
  read_if(j, "max_outer_iters", c.max_outer_iters);
  read_if(j, "outer_tol", c.outer_tol);
  read_if(j, "inner", c.inner);
  if (j.contains("ridge")) {
    if (j.at("ridge").is_null()) {
      c.ridge.reset();
    } else {
      double r = 0.0;
      read_if(j, "ridge", r);
      c.ridge = r;
    }
  }
  c.validate();
}

void to_json(json& j, const GsoConstraintSet& c) {
  j = json{{"symmetric", c.symmetric},
           {"zero_diagonal", c.zero_diagonal},
           {"nonnegative", c.nonnegative},
           {"entry_upper_bound",
            c.entry_upper_bound ? json(*c.entry_upper_bound) : json(nullptr)}};
}

void from_json(const json& j, GsoConstraintSet& c) {
  reject_unknown(j, {"symmetric", "zero_diagonal", "nonnegative", "entry_upper_bound"},
                 "constraints");
  read_if(j, "symmetric", c.symmetric);
  read_if(j, "zero_diagonal", c.zero_diagonal);
  read_if(j, "nonnegative", c.nonnegative);
  if (j.contains("entry_upper_bound")) {
    if (j.at("entry_upper_bound").is_null()) {
      c.entry_upper_bound.reset();
    } else {
      double ub = 0.0;
      read_if(j, "entry_upper_bound", ub);
      c.entry_upper_bound = ub;
    }
  }
}

RfiConfig load_rfi_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open solver config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParameterError("solver config '" + path + "': " + e.what());
  }
  RfiConfig cfg;
  from_json(j, cfg);
  return cfg;
}

}  // namespace rfi
