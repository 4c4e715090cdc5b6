#include <doctest.h>

#include <cmath>
#include <random>

#include "lvhba/bench.hpp"
#include "lvhba/solver.hpp"
#include "oracles.hpp"

using namespace lvhba;
using test::random_vec;

namespace {

Vec scalar(double v) { return Vec::Constant(1, v); }

IterateState make_state(double x, double y, double z, double th, double lam,
                        long k = 0) {
  IterateState s;
  s.x = scalar(x);
  s.y = scalar(y);
  s.z = scalar(z);
  s.theta = scalar(th);
  s.lambda = scalar(lam);
  s.k = k;
  return s;
}

bench::BenchmarkInstance testbed_flat_F() {
  auto inst = bench::build_scalar_testbed();
  inst.problem.eval_F = [](const Vec&, const Vec&) { return 0.0; };
  inst.problem.grad_F = [](const Vec&, const Vec&) {
    return GradPair{Vec::Zero(1), Vec::Zero(1)};
  };
  inst.problem.F_lower = 0.0;
  inst.moduli.L_F = 0.0;
  return inst;
}

Schedule zero_schedule() { return Schedule{Schedule::Kind::Constant, 0.0, 0.0}; }

}  // namespace

TEST_CASE("outer_directions evaluates the update formulas") {
  auto inst = testbed_flat_F();
  const auto& pb = inst.problem;
  const Gamma gamma{1.0, 1.0};

  // lambda+ = z kills d_z.
  {
    const auto d = outer_directions(pb, scalar(0.5), scalar(0.2), scalar(0.3),
                                    scalar(0.1), scalar(0.3), 1.0, gamma);
    CHECK(d.d_z[0] == doctest::Approx(0.0));
  }
  // theta+ = y with x-independent f and g reduces d_x to grad_x F / c_k.
  {
    auto iso = bench::build_scalar_testbed();
    iso.problem.eval_g = [](const Vec&, const Vec& y) {
      Vec g(1);
      g << y[0] - 2.0;
      return g;
    };
    iso.problem.jac_g_x = [](const Vec&, const Vec&) {
      return Mat::Zero(1, 1);
    };
    const auto d = outer_directions(iso.problem, scalar(0.5), scalar(0.2),
                                    scalar(0.0), scalar(0.2), scalar(0.4), 2.0,
                                    gamma);
    CHECK(d.d_x[0] == doctest::Approx(0.5 / 2.0));
  }
  // Scalar testbed numbers with F == 0.
  {
    const auto d = outer_directions(pb, scalar(-1), scalar(0), scalar(0),
                                    scalar(0.0), scalar(0.1), 1.0, gamma);
    CHECK(d.d_x[0] == doctest::Approx(0.1));
    CHECK(d.d_y[0] == doctest::Approx(0.0));
    CHECK(d.d_z[0] == doctest::Approx(-0.1));
  }
}

TEST_CASE("lv_hba_step runs one full iteration in order") {
  auto inst = testbed_flat_F();
  SolverConfig cfg = inst.default_config;
  cfg.alpha = Schedule::constant(0.1);
  cfg.beta = Schedule::constant(0.1);
  cfg.eta = Schedule::constant(0.1);
  cfg.c_bar = 1.0;

  const auto next = lv_hba_step(inst.problem, inst.set_C,
                                make_state(-1, 0, 0, 0, 0), cfg);
  // Inner: (theta+, lambda+) = (0, 0.1). Outer pre-projection point
  // (-1.01, 0) violates y <= x and lands on the halfspace boundary.
  CHECK(next.theta[0] == doctest::Approx(0.0));
  CHECK(next.lambda[0] == doctest::Approx(0.1));
  CHECK(next.x[0] == doctest::Approx(-0.505));
  CHECK(next.y[0] == doctest::Approx(-0.505));
  CHECK(next.z[0] == doctest::Approx(0.01));
  CHECK(next.k == 1);
}

TEST_CASE("lv_hba_step keeps a stationary point fixed") {
  auto inst = testbed_flat_F();
  SolverConfig cfg = inst.default_config;
  // (x,y,z,theta,lambda) = (1,0,0,0,0): saddle fixed point, zero directions.
  const auto next = lv_hba_step(inst.problem, inst.set_C,
                                make_state(1, 0, 0, 0, 0), cfg);
  CHECK(std::abs(next.x[0] - 1.0) <= 1e-12);
  CHECK(std::abs(next.y[0]) <= 1e-12);
  CHECK(std::abs(next.z[0]) <= 1e-12);
  CHECK(std::abs(next.theta[0]) <= 1e-12);
  CHECK(std::abs(next.lambda[0]) <= 1e-12);
}

TEST_CASE("zero outer steps isolate the inner update") {
  auto inst = testbed_flat_F();
  SolverConfig cfg = inst.default_config;
  cfg.alpha = zero_schedule();
  cfg.beta = zero_schedule();
  cfg.eta = Schedule::constant(0.1);

  const auto s0 = make_state(0.5, -1, 0, 1, 0);  // feasible: y <= x
  const auto next = lv_hba_step(inst.problem, inst.set_C, s0, cfg);
  CHECK(next.x[0] == doctest::Approx(0.5));
  CHECK(next.y[0] == doctest::Approx(-1.0));
  CHECK(next.z[0] == doctest::Approx(0.0));
  CHECK(next.theta[0] == doctest::Approx(0.7));  // inner still advances
  CHECK(next.lambda[0] == doctest::Approx(0.05));
}

TEST_CASE("run records an initial row and honors max_iters = 0") {
  auto inst = bench::build_scalar_testbed();
  SolverConfig cfg = inst.default_config;
  cfg.max_iters = 0;
  IterateState init;
  init.x = inst.default_init_x;
  init.y = inst.default_init_y;
  const auto trace =
      run(inst.problem, inst.set_C, cfg, inst.constants(), init);
  REQUIRE(trace.records.size() == 1);
  CHECK(trace.records[0].k == 0);
  CHECK(trace.records[0].gap.has_value());
  CHECK(trace.records[0].residual.has_value());
}

TEST_CASE("run is deterministic and preserves feasibility") {
  auto inst = bench::build_merely_convex(6);
  SolverConfig cfg = inst.default_config;
  cfg.max_iters = 300;
  cfg.residual_every = 50;
  IterateState init;
  init.x = inst.default_init_x;
  init.y = inst.default_init_y;

  const ConvexSet set_Z = multiplier_box(inst.problem.dim_g, cfg.r);
  std::vector<IterateState> states;
  RunHooks hooks;
  hooks.on_record = [&](const TraceRecord&, const IterateState& s) {
    states.push_back(s);
    return true;
  };
  const auto t1 = run(inst.problem, inst.set_C, cfg, inst.constants(), init,
                      hooks);
  const auto t2 = run(inst.problem, inst.set_C, cfg, inst.constants(), init);

  REQUIRE(t1.records.size() == t2.records.size());
  REQUIRE(t1.records.size() == 301);
  for (std::size_t i = 0; i < t1.records.size(); ++i) {
    const auto& a = t1.records[i];
    const auto& b = t2.records[i];
    CHECK(a.k == b.k);
    CHECK(a.F == b.F);  // bitwise: identical trajectories
    CHECK(a.f == b.f);
    CHECK(a.dxy == b.dxy);
    CHECK(a.gap == b.gap);
    CHECK(a.residual == b.residual);
    // Cadenced fields appear exactly at multiples of residual_every.
    CHECK(a.gap.has_value() == (a.k % cfg.residual_every == 0));
    CHECK(a.residual.has_value() == (a.k % cfg.residual_every == 0));
  }
  for (const auto& s : states) {
    Vec xy(s.x.size() + s.y.size());
    xy << s.x, s.y;
    CHECK(contains(inst.set_C, xy, 1e-9).inside);
    CHECK(contains(set_Z, s.z, 1e-9).inside);
    CHECK(contains(set_Z, s.lambda, 1e-9).inside);
  }
}

TEST_CASE("run projects the user initial point") {
  auto inst = bench::build_merely_convex(4);
  SolverConfig cfg = inst.default_config;
  cfg.max_iters = 1;
  IterateState init;
  init.x = Vec::Constant(4, 10.0);
  init.y = Vec::Constant(8, 10.0);
  IterateState first;
  RunHooks hooks;
  hooks.on_record = [&](const TraceRecord& rec, const IterateState& s) {
    if (rec.k == 0) first = s;
    return true;
  };
  run(inst.problem, inst.set_C, cfg, inst.constants(), init, hooks);
  CHECK(first.x.norm() <= 1e-12);  // the 10*1 point projects to the origin
  CHECK(first.y.norm() <= 1e-12);
  CHECK(first.theta.isApprox(first.y));
  CHECK(first.lambda.norm() == 0.0);

  cfg.project_init = false;
  TraceRecord first_rec;
  RunHooks hooks2;
  hooks2.on_record = [&](const TraceRecord& rec, const IterateState& s) {
    if (rec.k == 0) {
      first = s;
      first_rec = rec;
    }
    return true;
  };
  run(inst.problem, inst.set_C, cfg, inst.constants(), init, hooks2);
  CHECK(first.x.isApprox(init.x));  // X = R^n leaves the point alone
  // Diagnostics need (x,y) in C; the unprojected start has none at k = 0.
  CHECK_FALSE(first_rec.gap.has_value());
  CHECK_FALSE(first_rec.residual.has_value());
}

TEST_CASE("the solver is single-loop: constant oracle cost per iteration") {
  test::OracleCounters counts;
  auto inst = bench::build_scalar_testbed();
  const auto counted = test::wrap_counting(inst.problem, counts);
  SolverConfig cfg = inst.default_config;
  cfg.residual_every = 1 << 20;
  cfg.record_every = 1;
  const auto tc = inst.constants();

  // Measure the cost of the k=0 record once, then of records + steps.
  auto run_iters = [&](long iters) {
    counts = {};
    SolverConfig c = cfg;
    c.max_iters = iters;
    IterateState init;
    init.x = scalar(1.0);
    init.y = scalar(-1.0);
    run(counted, inst.set_C, c, tc, init);
    return counts;
  };
  const auto at0 = run_iters(0);
  const auto at10 = run_iters(10);
  const auto at20 = run_iters(20);

  // Per-iteration increments are exactly constant: one gda_step plus one
  // outer update and one trace row, never a nested solve.
  CHECK(at20.grad_f - at10.grad_f == at10.grad_f - at0.grad_f);
  CHECK((at10.grad_f - at0.grad_f) % 10 == 0);
  CHECK((at10.grad_f - at0.grad_f) / 10 == 3);
  CHECK((at10.eval_g - at0.eval_g) / 10 == 1);
  CHECK((at10.jac_g_y - at0.jac_g_y) / 10 == 1);
  CHECK((at10.jac_g_x - at0.jac_g_x) / 10 == 1);
  CHECK((at10.grad_F - at0.grad_F) / 10 == 1);
  CHECK((at10.eval_F - at0.eval_F) / 10 == 1);
}

TEST_CASE("run handles p = 0 problems end to end") {
  auto inst = bench::build_scalar_testbed(false);
  SolverConfig cfg = inst.default_config;
  cfg.max_iters = 50;
  cfg.residual_every = 10;
  IterateState init;
  init.x = scalar(-2.0);
  init.y = scalar(1.0);
  const auto trace =
      run(inst.problem, inst.set_C, cfg, inst.constants(), init);
  CHECK(trace.records.size() == 51);
  CHECK(trace.meta.abort_reason.empty());
  CHECK(trace.records.back().residual.has_value());
  CHECK(*trace.records.back().gap >= -1e-9);
}

TEST_CASE("residual_Rk closed-form cases") {
  auto inst = testbed_flat_F();
  const auto tc = inst.constants();
  const Gamma gamma{1.0, 1.0};
  const ConvexSet set_Z = multiplier_box(1, 10.0);

  // At the stationary point (1,0,0) every term vanishes.
  CHECK(residual_Rk(inst.problem, scalar(1), scalar(0), scalar(0), 1.0, gamma,
                    10.0, inst.set_C, set_Z, tc, 1e-12) ==
        doctest::Approx(0.0).epsilon(1e-9));

  // Interior point of C x Z: the residual equals ||d||. Compare against the
  // directly assembled direction vector.
  const Vec x = scalar(2.0), y = scalar(-1.0), z = scalar(3.0);
  SaddleOptions opts;
  opts.tol = 1e-12;
  const auto sp = saddle_oracle(inst.problem, x, y, z, gamma, 10.0, tc, opts);
  const auto gv = grad_v(inst.problem, x, y, z, sp, gamma);
  const double c_k = 2.5;
  const auto gf = inst.problem.grad_f(x, y);
  Vec d(3);
  d << 0.0 + c_k * (gf.x[0] - gv.x[0]), 0.0 + c_k * (gf.y[0] - gv.y[0]),
      -c_k * gv.z[0];
  const double expect = d.norm();
  CHECK(residual_Rk(inst.problem, x, y, z, c_k, gamma, 10.0, inst.set_C, set_Z,
                    tc, 1e-12) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("residual_Rk at the merely convex reference splits as predicted") {
  // At the bilevel solution with the matching multiplier anchor, the
  // penalty part of the direction has no tangent component; what remains is
  // the tangent projection of grad F alone.
  const Index n = 10;
  auto inst = bench::build_merely_convex(n);
  const auto tc = inst.constants();
  const Gamma gamma = inst.default_config.gamma;
  const ConvexSet set_Z = multiplier_box(2, inst.default_config.r);

  const Vec x = Vec::Constant(n, -0.3);
  Vec y(2 * n);
  y.head(n).setConstant(0.7);
  y.tail(n).setConstant(-0.4);
  Vec z(2);
  z << 0.0, 1.0;  // signed rows carry the equality multiplier mu = -1

  for (double c_k : {1.0, 10.0, 1000.0}) {
    const double R = residual_Rk(inst.problem, x, y, z, c_k, gamma,
                                 inst.default_config.r, inst.set_C, set_Z, tc,
                                 1e-12);
    // Tangent part of grad F on the hyperplane, computed independently.
    const auto gF = inst.problem.grad_F(x, y);
    Vec gxy(3 * n);
    gxy << gF.x, gF.y;
    const Vec tangent = gxy - Vec::Constant(3 * n, gxy.mean());
    CHECK(std::abs(R - tangent.norm()) <= 1e-6 * c_k);
  }
}

TEST_CASE("merit_Vk vanishes at a saddle-consistent optimum and is "
          "nonnegative on feasible states") {
  auto inst = bench::build_scalar_testbed();
  const auto tc = inst.constants();
  const Gamma gamma{1.0, 1.0};

  // (1, 0, 0): gap 0, (theta,lambda) at the saddle, F at its lower bound.
  const double F_at = inst.problem.eval_F(scalar(1), scalar(0));
  CHECK(merit_Vk(inst.problem, make_state(1, 0, 0, 0, 0), 1.0, gamma, 10.0, tc,
                 1e-12, F_at) == doctest::Approx(0.0).epsilon(1e-10));

  std::mt19937_64 rng(61);
  for (int t = 0; t < 50; ++t) {
    const double x = random_vec(rng, 1, 2.0)[0];
    const double y = x - std::abs(random_vec(rng, 1, 2.0)[0]);
    const double z = std::min(std::abs(random_vec(rng, 1, 3.0)[0]), 10.0);
    const auto s = make_state(x, y, z, random_vec(rng, 1, 1.0)[0],
                              std::min(std::abs(random_vec(rng, 1, 1.0)[0]),
                                       10.0));
    CHECK(merit_Vk(inst.problem, s, 1.7, gamma, 10.0, tc, 1e-10, 0.0) >=
          -1e-9);
  }
}

TEST_CASE("merit descends along theory-mode steps (sufficient decrease)") {
  auto inst = bench::build_scalar_testbed();
  const auto tc = inst.constants();
  const Gamma gamma = inst.default_config.gamma;
  const double r = inst.default_config.r;

  const double eta = tc.inner_step();
  const double alpha = tc.alpha_cap(eta, 1.0);
  const double beta = tc.beta_cap(eta);
  SolverConfig cfg = inst.default_config;
  cfg.alpha = Schedule::constant(alpha);
  cfg.beta = Schedule::constant(beta);
  cfg.eta = Schedule::constant(eta);

  IterateState s = make_state(-1.0, -2.0, 0.5, 1.0, 0.2);
  // Project the start onto the feasible sets by hand.
  Vec xy(2);
  xy << s.x[0], s.y[0];
  xy = project(inst.set_C, xy);
  s.x = scalar(xy[0]);
  s.y = scalar(xy[1]);

  const double F_lower = 0.0;
  double V_prev = merit_Vk(inst.problem, s, cfg.penalty(0), gamma, r, tc,
                           1e-12, F_lower);
  SaddleOptions oracle;
  oracle.tol = 1e-12;
  for (long k = 0; k < 200; ++k) {
    const auto sp = saddle_oracle(inst.problem, s.x, s.y, s.z, gamma, r, tc,
                                  oracle);
    const double dist2 = (s.theta - sp.theta_star).squaredNorm() +
                         (s.lambda - sp.lambda_star).squaredNorm();
    const IterateState next = lv_hba_step(inst.problem, inst.set_C, s, cfg);
    const double V_next = merit_Vk(inst.problem, next, cfg.penalty(k + 1),
                                   gamma, r, tc, 1e-12, F_lower);
    const double dxy2 = (next.x - s.x).squaredNorm() +
                        (next.y - s.y).squaredNorm();
    const double dz2 = (next.z - s.z).squaredNorm();
    const double rhs = -dxy2 / (4.0 * alpha) - dz2 / (4.0 * beta) -
                       eta * tc.rho_T * tc.C_thetalambda * dist2 +
                       1e-8 * (1.0 + std::abs(V_prev));
    CHECK(V_next - V_prev <= rhs);
    s = next;
    V_prev = V_next;
  }
}

TEST_CASE("run records merit at cadence and freezes the running F bound") {
  auto inst = bench::build_scalar_testbed();
  inst.problem.F_lower.reset();  // force the running-minimum path
  SolverConfig cfg = inst.default_config;
  cfg.max_iters = 20;
  cfg.record_every = 5;
  cfg.residual_every = 10;
  cfg.record_merit = true;
  IterateState init;
  init.x = scalar(1.0);
  init.y = scalar(0.5);
  const auto trace =
      run(inst.problem, inst.set_C, cfg, inst.constants(), init);
  REQUIRE(trace.records.size() == 5);  // k = 0, 5, 10, 15, 20
  for (const auto& rec : trace.records) {
    CHECK(rec.k % 5 == 0);
    CHECK(rec.merit.has_value() == (rec.k % 10 == 0));
    // The frozen running-minimum bound shifts V by a constant, so V may dip
    // below zero; nonnegativity holds only for a true lower bound.
    if (rec.merit) CHECK(std::isfinite(*rec.merit));
  }
}

TEST_CASE("early stop triggers on the configured tolerances") {
  auto inst = bench::build_scalar_testbed();
  SolverConfig cfg = inst.default_config;
  cfg.max_iters = 5000;
  cfg.residual_every = 10;
  cfg.rtol = 1e-3;
  cfg.gtol = 1e-6;
  IterateState init;
  init.x = scalar(1.0);
  init.y = scalar(0.5);
  const auto trace =
      run(inst.problem, inst.set_C, cfg, inst.constants(), init);
  CHECK(trace.meta.stopped_early);
  CHECK(trace.records.back().k < 5000);
}

TEST_CASE("run aborts with a partial trace on oracle failure") {
  auto inst = bench::build_scalar_testbed();
  long calls = 0;
  const auto base = inst.problem.grad_f;
  inst.problem.grad_f = [&calls, base](const Vec& x, const Vec& y) {
    if (++calls > 20) throw std::runtime_error("injected oracle failure");
    return base(x, y);
  };
  SolverConfig cfg = inst.default_config;
  cfg.max_iters = 100;
  cfg.residual_every = 1000000;
  IterateState init;
  init.x = scalar(1.0);
  init.y = scalar(0.5);
  const auto trace =
      run(inst.problem, inst.set_C, cfg, inst.constants(), init);
  CHECK(!trace.meta.abort_reason.empty());
  CHECK(trace.records.size() >= 1);
  CHECK(trace.records.size() < 101);
}
