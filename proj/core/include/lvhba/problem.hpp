#pragma once

#include <functional>
#include <optional>

#include "lvhba/sets.hpp"
#include "lvhba/types.hpp"

namespace lvhba {

/// A bilevel problem
///
///   min_{x in X, y in Y} F(x,y)  s.t.  y solves  min_{y' in Y} f(x,y')
///                                                s.t. g(x,y') <= 0,
///
/// given through zeroth- and first-order oracles only. The lower-level
/// solution set is never materialized. All callables must be reentrant; a
/// constructed problem is immutable and safe for concurrent reads.
struct BilevelProblem {
  Index dim_x = 0;  // n
  Index dim_y = 0;  // m
  Index dim_g = 0;  // p

  std::function<double(const Vec&, const Vec&)> eval_F;
  std::function<GradPair(const Vec&, const Vec&)> grad_F;
  std::function<double(const Vec&, const Vec&)> eval_f;
  std::function<GradPair(const Vec&, const Vec&)> grad_f;
  std::function<Vec(const Vec&, const Vec&)> eval_g;    // length p
  std::function<Mat(const Vec&, const Vec&)> jac_g_x;   // p x n
  std::function<Mat(const Vec&, const Vec&)> jac_g_y;   // p x m

  ConvexSet set_X{WholeSpace{0}};
  ConvexSet set_Y{WholeSpace{0}};

  /// Weak-convexity constant of f (rho_f); 0 for convex f.
  double rho_f = 0.0;

  /// Lower bound on F over X x Y. When absent, merit evaluation freezes a
  /// running minimum of observed values at its first call.
  std::optional<double> F_lower;
};

/// Throws std::invalid_argument if dimensions or callables are inconsistent.
void check_problem_shape(const BilevelProblem& pb);

}  // namespace lvhba
