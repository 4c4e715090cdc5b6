#pragma once

#include "lvhba/constants.hpp"
#include "lvhba/problem.hpp"
#include "lvhba/state.hpp"

namespace lvhba {

/// Saddle point of the proximal min-max problem defining v_{gamma,r}(x,y,z),
/// together with the value at it.
struct SaddlePoint {
  Vec theta_star;          // in Y
  Vec lambda_star;         // in Z = [0,r]^p
  double value = 0.0;      // v_{gamma,r}(x,y,z)
  long iterations_used = 0;
  double final_step_change = 0.0;
};

/// The inner GDA directions (d_theta, d_lambda).
struct InnerDirections {
  Vec d_theta;
  Vec d_lambda;
};

/// Gradient of v_{gamma,r} split into the three variable blocks.
struct ValueGradient {
  Vec x;
  Vec y;
  Vec z;
};

/// The inner objective
///   f(x,theta) + lambda'g(x,theta)
///     + ||theta - y||^2/(2 gamma1) - ||lambda - z||^2/(2 gamma2).
double eval_lagrangian(const BilevelProblem& pb, const Vec& x, const Vec& y,
                       const Vec& z, const Vec& theta, const Vec& lambda,
                       Gamma gamma);

/// d_theta = grad_y f(x,theta) + lambda'grad_y g(x,theta) + (theta-y)/gamma1
/// d_lambda = -g(x,theta) + (lambda-z)/gamma2
InnerDirections inner_directions(const BilevelProblem& pb,
                                 const IterateState& s, Gamma gamma);

/// One simultaneous projected descent/ascent step:
/// (theta+, lambda+) = Proj_{Y x Z}((theta,lambda) - eta (d_theta, d_lambda)).
/// Contraction toward the saddle is guaranteed for eta in (0, rho_T/L_B^2).
std::pair<Vec, Vec> gda_step(const BilevelProblem& pb, const IterateState& s,
                             double eta, Gamma gamma, const ConvexSet& set_Y,
                             const ConvexSet& set_Z);

struct SaddleOptions {
  double tol = 1e-10;
  long max_inner = 100000;
  const Vec* warm_theta = nullptr;   // optional warm start
  const Vec* warm_lambda = nullptr;
};

/// Iterates gda_step with the fixed step 0.9 * rho_T / L_B^2 until the step
/// change drops below tol. This is the ground-truth oracle used by the
/// diagnostics and by every test of the gradient formula; the single-loop
/// algorithm itself never calls it. Throws std::runtime_error when max_inner
/// is exhausted.
SaddlePoint saddle_oracle(const BilevelProblem& pb, const Vec& x, const Vec& y,
                          const Vec& z, Gamma gamma, double r,
                          const TheoryConstants& tc,
                          const SaddleOptions& opts = {});

/// Exact gradient of v_{gamma,r} at (x,y,z) from its saddle point:
///   ( grad_x f(x,th*) + lam*'grad_x g(x,th*), (y-th*)/gamma1, (lam*-z)/gamma2 ).
ValueGradient grad_v(const BilevelProblem& pb, const Vec& x, const Vec& y,
                     const Vec& z, const SaddlePoint& saddle, Gamma gamma);

/// v_{gamma,r}(x,y,z) through the saddle oracle. The untruncated value
/// function is obtained with r = kUntruncatedRadius.
double value_v(const BilevelProblem& pb, const Vec& x, const Vec& y,
               const Vec& z, Gamma gamma, double r, const TheoryConstants& tc,
               const SaddleOptions& opts = {});

/// Stand-in radius realizing the untruncated multiplier set in diagnostics.
inline constexpr double kUntruncatedRadius = 1e6;

/// f(x,y) - v_{gamma,r}(x,y,z), nonnegative on C x Z. Throws
/// std::invalid_argument when (x,y) is not in C or z not in Z within tol.
double feasibility_gap(const BilevelProblem& pb, const Vec& x, const Vec& y,
                       const Vec& z, Gamma gamma, double r,
                       const TheoryConstants& tc, double tol = 1e-8);

}  // namespace lvhba
