#pragma once

#include <optional>
#include <stdexcept>

#include "lvhba/types.hpp"

namespace lvhba {

/// A step-size schedule evaluated at the iteration index k.
struct Schedule {
  enum class Kind { Constant, Polynomial };

  Kind kind = Kind::Constant;
  double value = 0.0;     // constant value, or polynomial scale
  double exponent = 0.0;  // polynomial: value * (k+1)^exponent

  static Schedule constant(double v) {
    if (v <= 0) throw std::invalid_argument("Schedule: value must be positive");
    return {Kind::Constant, v, 0.0};
  }
  static Schedule polynomial(double scale, double exponent) {
    if (scale <= 0)
      throw std::invalid_argument("Schedule: scale must be positive");
    return {Kind::Polynomial, scale, exponent};
  }

  double operator()(long k) const {
    if (kind == Kind::Constant) return value;
    return value * std::pow(static_cast<double>(k + 1), exponent);
  }
};

/// Solver parameters. The penalty schedule is c_k = c_bar * (k+1)^p_exp.
struct SolverConfig {
  Gamma gamma;            // proximal parameters (gamma1, gamma2)
  double r = 10.0;        // truncation radius, Z = [0,r]^p

  Schedule alpha = Schedule::constant(0.01);  // outer (x,y) step
  Schedule beta = Schedule::constant(0.01);   // outer z step
  Schedule eta = Schedule::constant(0.05);    // inner GDA step

  double c_bar = 1.0;     // penalty scale
  double p_exp = 0.3;     // penalty exponent, must lie in (0, 1/2)

  long max_iters = 1000;
  double saddle_oracle_tol = 1e-10;   // diagnostic oracle accuracy
  long residual_every = 100;          // diagnostic cadence
  long record_every = 1;              // trace record cadence
  bool record_merit = false;

  // Early stop, off by default: stop once R_k/c_k <= rtol and gap <= gtol
  // (whichever of the two are set).
  std::optional<double> rtol;
  std::optional<double> gtol;

  // Project the user initial (x,y) onto C before iterating.
  bool project_init = true;

  double penalty(long k) const {
    return c_bar * std::pow(static_cast<double>(k + 1), p_exp);
  }

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

}  // namespace lvhba
