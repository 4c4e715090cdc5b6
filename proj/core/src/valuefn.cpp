#include "lvhba/valuefn.hpp"

#include <cmath>
#include <stdexcept>

namespace lvhba {

void check_problem_shape(const BilevelProblem& pb) {
  if (pb.dim_x <= 0 || pb.dim_y <= 0)
    throw std::invalid_argument("problem: dim_x and dim_y must be positive");
  if (pb.dim_g < 0)
    throw std::invalid_argument("problem: dim_g must be nonnegative");
  if (!pb.eval_F || !pb.grad_F || !pb.eval_f || !pb.grad_f)
    throw std::invalid_argument("problem: objective oracles missing");
  if (pb.dim_g > 0 && (!pb.eval_g || !pb.jac_g_x || !pb.jac_g_y))
    throw std::invalid_argument("problem: constraint oracles missing");
  if (dim(pb.set_X) != pb.dim_x || dim(pb.set_Y) != pb.dim_y)
    throw std::invalid_argument("problem: set dimensions disagree with dims");
}

namespace {

Vec eval_g_or_empty(const BilevelProblem& pb, const Vec& x, const Vec& th) {
  if (pb.dim_g == 0) return Vec(0);
  Vec g = pb.eval_g(x, th);
  if (g.size() != pb.dim_g)
    throw std::invalid_argument("problem: eval_g returned wrong length");
  return g;
}

}  // namespace

double eval_lagrangian(const BilevelProblem& pb, const Vec& x, const Vec& y,
                       const Vec& z, const Vec& theta, const Vec& lambda,
                       Gamma gamma) {
  if (gamma.gamma1 <= 0 || gamma.gamma2 <= 0)
    throw std::invalid_argument("eval_lagrangian: gamma must be positive");
  double val = pb.eval_f(x, theta) + (theta - y).squaredNorm() /
                                         (2.0 * gamma.gamma1);
  if (pb.dim_g > 0) {
    val += lambda.dot(eval_g_or_empty(pb, x, theta));
    val -= (lambda - z).squaredNorm() / (2.0 * gamma.gamma2);
  }
  return val;
}

InnerDirections inner_directions(const BilevelProblem& pb,
                                 const IterateState& s, Gamma gamma) {
  InnerDirections d;
  d.d_theta = pb.grad_f(s.x, s.theta).y + (s.theta - s.y) / gamma.gamma1;
  if (pb.dim_g > 0) {
    d.d_theta += pb.jac_g_y(s.x, s.theta).transpose() * s.lambda;
    d.d_lambda =
        -eval_g_or_empty(pb, s.x, s.theta) + (s.lambda - s.z) / gamma.gamma2;
  } else {
    d.d_lambda = Vec(0);
  }
  return d;
}

std::pair<Vec, Vec> gda_step(const BilevelProblem& pb, const IterateState& s,
                             double eta, Gamma gamma, const ConvexSet& set_Y,
                             const ConvexSet& set_Z) {
  const InnerDirections d = inner_directions(pb, s, gamma);
  Vec theta_next = project(set_Y, s.theta - eta * d.d_theta);
  Vec lambda_next = pb.dim_g > 0
                        ? project(set_Z, s.lambda - eta * d.d_lambda)
                        : Vec(0);
  return {std::move(theta_next), std::move(lambda_next)};
}

SaddlePoint saddle_oracle(const BilevelProblem& pb, const Vec& x, const Vec& y,
                          const Vec& z, Gamma gamma, double r,
                          const TheoryConstants& tc, const SaddleOptions& opts) {
  if (opts.tol <= 0)
    throw std::invalid_argument("saddle_oracle: tol must be positive");
  if (pb.rho_f > 0 && gamma.gamma1 >= 1.0 / pb.rho_f)
    throw std::invalid_argument("saddle_oracle: gamma1 >= 1/rho_f");
  const ConvexSet set_Z = multiplier_box(pb.dim_g, r);
  const double eta = tc.inner_step();

  IterateState s;
  s.x = x;
  s.y = y;
  s.z = z;
  s.theta = opts.warm_theta ? *opts.warm_theta : project(pb.set_Y, y);
  s.lambda = opts.warm_lambda ? project(set_Z, *opts.warm_lambda)
                              : project(set_Z, z);

  SaddlePoint out;
  for (long it = 0; it < opts.max_inner; ++it) {
    auto [theta_next, lambda_next] = gda_step(pb, s, eta, gamma, pb.set_Y,
                                              set_Z);
    const double change =
        std::sqrt((theta_next - s.theta).squaredNorm() +
                  (lambda_next - s.lambda).squaredNorm());
    s.theta = std::move(theta_next);
    s.lambda = std::move(lambda_next);
    if (change <= opts.tol) {
      out.theta_star = s.theta;
      out.lambda_star = s.lambda;
      out.value = eval_lagrangian(pb, x, y, z, s.theta, s.lambda, gamma);
      out.iterations_used = it + 1;
      out.final_step_change = change;
      return out;
    }
  }
  throw std::runtime_error(
      "saddle_oracle: no convergence within max_inner; check the step guard "
      "and the supplied moduli");
}

ValueGradient grad_v(const BilevelProblem& pb, const Vec& x, const Vec& y,
                     const Vec& z, const SaddlePoint& saddle, Gamma gamma) {
  ValueGradient g;
  g.x = pb.grad_f(x, saddle.theta_star).x;
  if (pb.dim_g > 0)
    g.x += pb.jac_g_x(x, saddle.theta_star).transpose() * saddle.lambda_star;
  g.y = (y - saddle.theta_star) / gamma.gamma1;
  g.z = pb.dim_g > 0 ? Vec((saddle.lambda_star - z) / gamma.gamma2) : Vec(0);
  return g;
}

double value_v(const BilevelProblem& pb, const Vec& x, const Vec& y,
               const Vec& z, Gamma gamma, double r, const TheoryConstants& tc,
               const SaddleOptions& opts) {
  return saddle_oracle(pb, x, y, z, gamma, r, tc, opts).value;
}

double feasibility_gap(const BilevelProblem& pb, const Vec& x, const Vec& y,
                       const Vec& z, Gamma gamma, double r,
                       const TheoryConstants& tc, double tol) {
  if (!contains(pb.set_X, x, tol).inside || !contains(pb.set_Y, y, tol).inside)
    throw std::invalid_argument("feasibility_gap: (x,y) not in X x Y");
  if (pb.dim_g > 0) {
    const Vec g = eval_g_or_empty(pb, x, y);
    if (g.maxCoeff() > tol)
      throw std::invalid_argument(
          "feasibility_gap: g(x,y) <= 0 violated by " +
          std::to_string(g.maxCoeff()));
    if (z.minCoeff() < -tol || z.maxCoeff() > r + tol)
      throw std::invalid_argument("feasibility_gap: z not in [0,r]^p");
  }
  return pb.eval_f(x, y) - value_v(pb, x, y, z, gamma, r, tc);
}

}  // namespace lvhba
