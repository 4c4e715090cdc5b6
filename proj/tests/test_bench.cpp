#include <doctest.h>

#include <cmath>
#include <random>

#include "lvhba/bench.hpp"
#include "oracles.hpp"

using namespace lvhba;
using test::random_vec;

TEST_CASE("merely convex reference point") {
  auto inst = bench::build_merely_convex(1);
  const Vec x = Vec::Constant(1, -0.3);
  Vec y(2);
  y << 0.7, -0.4;

  // -0.3 + 0.7 - 0.4 = 0: the coupling equality holds exactly.
  const Vec g = inst.problem.eval_g(x, y);
  CHECK(g[0] == doctest::Approx(0.0));
  CHECK(g[1] == doctest::Approx(0.0));
  CHECK(inst.problem.eval_F(x, y) == doctest::Approx(0.05));
  REQUIRE(inst.known_x_star.has_value());
  Vec xy(3);
  xy << x, y;
  CHECK(contains(inst.set_C, xy, 1e-12).inside);
}

TEST_CASE("merely convex reference is lower-level optimal") {
  const Index n = 6;
  auto inst = bench::build_merely_convex(n);
  const Vec x = Vec::Constant(n, -0.3);
  Vec y(2 * n);
  y.head(n).setConstant(0.7);
  y.tail(n).setConstant(-0.4);

  // Recover the equality multiplier by least squares (brute-force KKT) and
  // check stationarity of f + mu * h on the coupling hyperplane.
  const GradPair gf = inst.problem.grad_f(x, y);
  Vec grad_y(2 * n);
  grad_y << gf.y;
  const Vec h_dir = Vec::Ones(2 * n);
  const double mu = -grad_y.dot(h_dir) / h_dir.squaredNorm();
  CHECK((grad_y + mu * h_dir).norm() <= 1e-9);

  // Equivalent statement via the tangent residual of the y-slice hyperplane.
  const ConvexSet ll_plane = hyperplane(Vec::Ones(2 * n), -x.sum());
  CHECK(tangent_residual(ll_plane, y, grad_y) <= 1e-9);
}

TEST_CASE("strongly convex solution map solves its constraint") {
  auto inst = bench::build_strongly_convex(16, 5);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const Vec x = random_vec(rng, 16, 2.0);
    const Vec ys = inst.ll_solution_map(x);
    // g stacks (Ay + Hx, -(Ay + Hx)); both signed halves must vanish.
    CHECK(inst.problem.eval_g(x, ys).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("strongly convex solution map matches the affine projection") {
  const Index n = 12;
  auto inst = bench::build_strongly_convex(n, 7);
  const Index k1 = inst.problem.dim_g / 2;
  std::mt19937_64 rng(5);
  const Mat A = inst.problem.jac_g_y(Vec::Zero(n), Vec::Zero(n)).topRows(k1);
  for (int t = 0; t < 20; ++t) {
    const Vec x = random_vec(rng, n, 2.0);
    // A y = -Hx with Hx read off g(x, 0).
    const Vec rhs = -inst.problem.eval_g(x, Vec::Zero(n)).head(k1);
    const Vec proj = project(affine_subspace(A, rhs), x);
    CHECK((proj - inst.ll_solution_map(x)).norm() <= 1e-10);
  }
}

TEST_CASE("strongly convex map is lower-level optimal among feasible points") {
  const Index n = 12;
  auto inst = bench::build_strongly_convex(n, 11);
  const Index k1 = inst.problem.dim_g / 2;
  const Mat A = inst.problem.jac_g_y(Vec::Zero(n), Vec::Zero(n)).topRows(k1);
  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    const Vec x = random_vec(rng, n, 2.0);
    const Vec rhs = -inst.problem.eval_g(x, Vec::Zero(n)).head(k1);
    const Vec ys = inst.ll_solution_map(x);
    const Vec y_feas = project(affine_subspace(A, rhs), random_vec(rng, n, 3.0));
    CHECK(inst.problem.eval_f(x, ys) <=
          inst.problem.eval_f(x, y_feas) + 1e-9);
  }
}

TEST_CASE("instance construction is deterministic in the seed") {
  auto a = bench::build_strongly_convex(8, 42);
  auto b = bench::build_strongly_convex(8, 42);
  auto c = bench::build_strongly_convex(8, 43);
  std::mt19937_64 rng(1);
  const Vec x = random_vec(rng, 8);
  const Vec y = random_vec(rng, 8);
  CHECK(a.problem.eval_F(x, y) == b.problem.eval_F(x, y));
  CHECK((a.problem.eval_g(x, y) - b.problem.eval_g(x, y)).norm() == 0.0);
  CHECK(a.problem.eval_F(x, y) != c.problem.eval_F(x, y));
}

TEST_CASE("metrics report references and omit what is unavailable") {
  auto mc = bench::build_merely_convex(4);
  IterateState s;
  s.x = *mc.known_x_star;
  s.y = Vec::Zero(8);
  const auto m = bench::metrics(mc, s);
  REQUIRE(m.rel_x_err.has_value());
  CHECK(*m.rel_x_err == doctest::Approx(0.0));
  CHECK_FALSE(m.ll_err.has_value());  // non-singleton lower level: no map

  auto sc = bench::build_strongly_convex(8, 3);
  IterateState t;
  t.x = Vec::Ones(8);
  t.y = sc.ll_solution_map(t.x);
  const auto ms = bench::metrics(sc, t);
  REQUIRE(ms.ll_err.has_value());
  CHECK(*ms.ll_err == doctest::Approx(0.0));
  REQUIRE(ms.hyper.has_value());
  CHECK_FALSE(ms.rel_x_err.has_value());
}

TEST_CASE("merely convex run approaches the analytic solution") {
  auto inst = bench::build_merely_convex(20);
  SolverConfig cfg = inst.default_config;
  cfg.max_iters = 5000;
  cfg.residual_every = 5000;
  IterateState init;
  init.x = inst.default_init_x;
  init.y = inst.default_init_y;
  bench::MetricsTracker tracker(inst);
  RunHooks hooks;
  hooks.on_record = std::ref(tracker);
  run(inst.problem, inst.set_C, cfg, inst.constants(), init, hooks);
  REQUIRE(tracker.iters_to_threshold.has_value());
  CHECK(*tracker.iters_to_threshold <= 5000);
}

TEST_CASE("builders reject degenerate dimensions") {
  CHECK_THROWS_AS(bench::build_merely_convex(0), std::invalid_argument);
  CHECK_THROWS_AS(bench::build_strongly_convex(1, 1), std::invalid_argument);
}
