#include "lvhba/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lvhba {

OuterDirections outer_directions(const BilevelProblem& pb, const Vec& x,
                                 const Vec& y, const Vec& z,
                                 const Vec& theta_next, const Vec& lambda_next,
                                 double c_k, Gamma gamma) {
  const GradPair gF = pb.grad_F(x, y);
  const GradPair gf_y = pb.grad_f(x, y);
  const GradPair gf_t = pb.grad_f(x, theta_next);

  OuterDirections d;
  d.d_x = gF.x / c_k + gf_y.x - gf_t.x;
  if (pb.dim_g > 0)
    d.d_x -= pb.jac_g_x(x, theta_next).transpose() * lambda_next;
  d.d_y = gF.y / c_k + gf_y.y - (y - theta_next) / gamma.gamma1;
  d.d_z = pb.dim_g > 0 ? Vec(-(lambda_next - z) / gamma.gamma2) : Vec(0);
  return d;
}

IterateState lv_hba_step(const BilevelProblem& pb, const ConvexSet& set_C,
                         const IterateState& s, const SolverConfig& config) {
  const long k = s.k;
  const double c_k = config.penalty(k);
  const ConvexSet set_Z = multiplier_box(pb.dim_g, config.r);

  // Line 2-3: inner directions at (x^k, y^k, z^k), projected GDA update.
  auto [theta_next, lambda_next] =
      gda_step(pb, s, config.eta(k), config.gamma, pb.set_Y, set_Z);

  // Line 4-5: outer directions with the new inner pair, projected updates.
  const OuterDirections d = outer_directions(pb, s.x, s.y, s.z, theta_next,
                                             lambda_next, c_k, config.gamma);
  Vec xy(s.x.size() + s.y.size());
  xy << s.x - config.alpha(k) * d.d_x, s.y - config.alpha(k) * d.d_y;
  xy = project(set_C, xy);

  IterateState next;
  next.x = xy.head(s.x.size());
  next.y = xy.tail(s.y.size());
  next.z = pb.dim_g > 0 ? project(set_Z, s.z - config.beta(k) * d.d_z) : Vec(0);
  next.theta = std::move(theta_next);
  next.lambda = std::move(lambda_next);
  next.k = k + 1;
  return next;
}

double residual_Rk(const BilevelProblem& pb, const Vec& x, const Vec& y,
                   const Vec& z, double c_k, Gamma gamma, double r,
                   const ConvexSet& set_C, const ConvexSet& set_Z,
                   const TheoryConstants& tc, double saddle_tol) {
  SaddleOptions opts;
  opts.tol = saddle_tol;
  const SaddlePoint sp = saddle_oracle(pb, x, y, z, gamma, r, tc, opts);
  const ValueGradient gv = grad_v(pb, x, y, z, sp, gamma);
  const GradPair gF = pb.grad_F(x, y);
  const GradPair gf = pb.grad_f(x, y);

  Vec d(x.size() + y.size() + z.size());
  d.head(x.size()) = gF.x + c_k * (gf.x - gv.x);
  d.segment(x.size(), y.size()) = gF.y + c_k * (gf.y - gv.y);
  if (z.size() > 0) d.tail(z.size()) = -c_k * gv.z;

  Vec w(x.size() + y.size() + z.size());
  w << x, y, z;
  return tangent_residual(product({set_C, set_Z}), w, d);
}

double merit_Vk(const BilevelProblem& pb, const IterateState& s, double c_k,
                Gamma gamma, double r, const TheoryConstants& tc,
                double saddle_tol, double F_lower) {
  SaddleOptions opts;
  opts.tol = saddle_tol;
  opts.warm_theta = &s.theta;
  opts.warm_lambda = &s.lambda;
  const SaddlePoint sp = saddle_oracle(pb, s.x, s.y, s.z, gamma, r, tc, opts);
  const double phi = (pb.eval_F(s.x, s.y) - F_lower) / c_k +
                     pb.eval_f(s.x, s.y) - sp.value;
  const double dist2 = (s.theta - sp.theta_star).squaredNorm() +
                       (s.lambda - sp.lambda_star).squaredNorm();
  return phi + tc.C_thetalambda * dist2;
}

namespace {

bool feasible_for_C(const ConvexSet& set_C, const Vec& x, const Vec& y,
                    double tol) {
  Vec xy(x.size() + y.size());
  xy << x, y;
  return contains(set_C, xy, tol).inside;
}

}  // namespace

Trace run(const BilevelProblem& pb, const ConvexSet& set_C,
          const SolverConfig& config, const TheoryConstants& tc,
          IterateState init, const RunHooks& hooks) {
  config.validate();
  check_problem_shape(pb);
  if (dim(set_C) != pb.dim_x + pb.dim_y)
    throw std::invalid_argument("run: set_C dimension mismatch");

  Trace trace;
  trace.meta.config = config;
  if (config.eta(0) >= tc.eta_guard())
    trace.meta.warnings.push_back(
        "eta outside the contraction guard (0, rho_T/L_B^2); practice-mode "
        "steps forfeit the descent guarantee");

  const ConvexSet set_Z = multiplier_box(pb.dim_g, config.r);

  // Normalize the initial point: (x,y) onto C (optional), z and lambda onto
  // Z, theta onto Y. Defaults follow (theta0, lambda0) = (Proj_Y(y0), 0).
  if (init.x.size() != pb.dim_x || init.y.size() != pb.dim_y)
    throw std::invalid_argument("run: init dimension mismatch");
  if (config.project_init) {
    Vec xy(init.x.size() + init.y.size());
    xy << init.x, init.y;
    xy = project(set_C, xy);
    init.x = xy.head(pb.dim_x);
    init.y = xy.tail(pb.dim_y);
  } else {
    init.x = project(pb.set_X, init.x);
    init.y = project(pb.set_Y, init.y);
  }
  if (init.z.size() != pb.dim_g) init.z = Vec::Zero(pb.dim_g);
  init.z = pb.dim_g > 0 ? project(set_Z, init.z) : Vec(0);
  if (init.theta.size() != pb.dim_y) init.theta = init.y;
  init.theta = project(pb.set_Y, init.theta);
  if (init.lambda.size() != pb.dim_g) init.lambda = Vec::Zero(pb.dim_g);
  init.lambda = pb.dim_g > 0 ? project(set_Z, init.lambda) : Vec(0);
  init.k = 0;

  const auto t0 = std::chrono::steady_clock::now();
  double running_min_F = std::numeric_limits<double>::infinity();
  std::optional<double> frozen_F_lower = pb.F_lower;

  IterateState s = std::move(init);
  IterateState prev = s;

  auto record = [&](const IterateState& cur) -> bool {
    TraceRecord rec;
    rec.k = cur.k;
    rec.c_k = config.penalty(cur.k);
    rec.F = pb.eval_F(cur.x, cur.y);
    rec.f = pb.eval_f(cur.x, cur.y);
    running_min_F = std::min(running_min_F, rec.F);
    rec.dxy = std::sqrt((cur.x - prev.x).squaredNorm() +
                        (cur.y - prev.y).squaredNorm());
    rec.dz = (cur.z - prev.z).norm();
    rec.dtl = std::sqrt((cur.theta - prev.theta).squaredNorm() +
                        (cur.lambda - prev.lambda).squaredNorm());

    bool stop = false;
    try {
    if (cur.k % config.residual_every == 0 &&
        feasible_for_C(set_C, cur.x, cur.y, 1e-8)) {
      SaddleOptions opts;
      opts.tol = config.saddle_oracle_tol;
      opts.warm_theta = &cur.theta;
      opts.warm_lambda = &cur.lambda;
      const SaddlePoint sp = saddle_oracle(pb, cur.x, cur.y, cur.z,
                                           config.gamma, config.r, tc, opts);
      rec.gap = pb.eval_f(cur.x, cur.y) - sp.value;

      const ValueGradient gv = grad_v(pb, cur.x, cur.y, cur.z, sp,
                                      config.gamma);
      const GradPair gF = pb.grad_F(cur.x, cur.y);
      const GradPair gf = pb.grad_f(cur.x, cur.y);
      Vec d(cur.x.size() + cur.y.size() + cur.z.size());
      d.head(cur.x.size()) = gF.x + rec.c_k * (gf.x - gv.x);
      d.segment(cur.x.size(), cur.y.size()) = gF.y + rec.c_k * (gf.y - gv.y);
      if (cur.z.size() > 0) d.tail(cur.z.size()) = -rec.c_k * gv.z;
      Vec w(cur.x.size() + cur.y.size() + cur.z.size());
      w << cur.x, cur.y, cur.z;
      rec.residual = tangent_residual(product({set_C, set_Z}), w, d);

      if (config.record_merit) {
        if (!frozen_F_lower) frozen_F_lower = running_min_F;
        const double phi =
            (rec.F - *frozen_F_lower) / rec.c_k + rec.f - sp.value;
        const double dist2 = (cur.theta - sp.theta_star).squaredNorm() +
                             (cur.lambda - sp.lambda_star).squaredNorm();
        rec.merit = phi + tc.C_thetalambda * dist2;
      }

      // Early stop on R_k/c_k and/or the value-function gap.
      const bool r_ok =
          !config.rtol || *rec.residual / rec.c_k <= *config.rtol;
      const bool g_ok = !config.gtol || *rec.gap <= *config.gtol;
      if ((config.rtol || config.gtol) && r_ok && g_ok) {
        stop = true;
        trace.meta.stopped_early = true;
      }
    }
    } catch (const std::exception& e) {
      // Diagnostics failed; keep the base fields and abort with what we have.
      trace.meta.abort_reason = e.what();
      stop = true;
    }
    rec.sec = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count();
    trace.records.push_back(rec);
    if (hooks.on_record && !hooks.on_record(rec, cur)) {
      stop = true;
      trace.meta.stopped_early = true;
    }
    return stop;
  };

  bool stop = record(s);
  for (long k = 0; k < config.max_iters && !stop; ++k) {
    try {
      IterateState next = lv_hba_step(pb, set_C, s, config);
      prev = std::move(s);
      s = std::move(next);
    } catch (const std::exception& e) {
      trace.meta.abort_reason = e.what();
      break;
    }
    if (s.k % config.record_every == 0 || s.k == config.max_iters)
      stop = record(s);
    trace.meta.iterations_run = s.k;
  }
  return trace;
}

}  // namespace lvhba
