#include "lvhba/bench.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace lvhba::bench {

BenchmarkInstance build_merely_convex(Index n) {
  if (n < 1) throw std::invalid_argument("build_merely_convex: n >= 1");

  BenchmarkInstance inst;
  inst.name = "merely_convex";

  BilevelProblem pb;
  pb.dim_x = n;
  pb.dim_y = 2 * n;
  pb.dim_g = 2;

  pb.eval_F = [n](const Vec& x, const Vec& y) {
    return 0.5 * (x - y.tail(n)).squaredNorm() +
           0.5 * (y.head(n) - Vec::Ones(n)).squaredNorm();
  };
  pb.grad_F = [n](const Vec& x, const Vec& y) {
    GradPair g;
    const Vec diff = x - y.tail(n);
    g.x = diff;
    g.y.resize(2 * n);
    g.y.head(n) = y.head(n) - Vec::Ones(n);
    g.y.tail(n) = -diff;
    return g;
  };
  pb.eval_f = [n](const Vec& x, const Vec& y) {
    return 0.5 * y.head(n).squaredNorm() - x.dot(y.head(n)) + y.tail(n).sum();
  };
  pb.grad_f = [n](const Vec& x, const Vec& y) {
    GradPair g;
    g.x = -y.head(n);
    g.y.resize(2 * n);
    g.y.head(n) = y.head(n) - x;
    g.y.tail(n) = Vec::Ones(n);
    return g;
  };
  // 1'x + 1'y1 + 1'y2 = 0 carried as the two signed rows (s, -s).
  pb.eval_g = [](const Vec& x, const Vec& y) {
    const double s = x.sum() + y.sum();
    Vec g(2);
    g << s, -s;
    return g;
  };
  pb.jac_g_x = [n](const Vec&, const Vec&) {
    Mat j(2, n);
    j.row(0).setOnes();
    j.row(1).setConstant(-1.0);
    return j;
  };
  pb.jac_g_y = [n](const Vec&, const Vec&) {
    Mat j(2, 2 * n);
    j.row(0).setOnes();
    j.row(1).setConstant(-1.0);
    return j;
  };
  pb.set_X = whole_space(n);
  pb.set_Y = whole_space(2 * n);
  pb.rho_f = 0.0;
  pb.F_lower = 0.0;
  inst.problem = std::move(pb);

  inst.set_C = hyperplane(Vec::Ones(3 * n), 0.0);

  SolverConfig cfg;
  cfg.gamma = {1.0, 1.0};
  cfg.r = 10.0;
  cfg.alpha = Schedule::constant(0.002);
  cfg.beta = Schedule::constant(0.002);
  cfg.eta = Schedule::constant(0.03);
  cfg.c_bar = 1.0;
  cfg.p_exp = 0.3;
  cfg.max_iters = 200000;
  cfg.residual_every = 1000;
  inst.default_config = cfg;

  // Exact moduli: the f-Hessian acts blockwise as [[0,-1],[-1,1]] on each
  // (x_i, y1_i) pair, the F-Hessian as [[1,-1],[-1,1]] on (x_i, y2_i).
  inst.moduli.L_F = 2.0;
  inst.moduli.L_f = (1.0 + std::sqrt(5.0)) / 2.0;
  inst.moduli.L_g = std::sqrt(3.0 * static_cast<double>(n));
  inst.moduli.L_g1 = 0.0;
  inst.moduli.L_g2 = 0.0;

  inst.known_x_star = Vec::Constant(n, -0.3);
  inst.default_init_x = Vec::Constant(n, 10.0);
  inst.default_init_y = Vec::Constant(2 * n, 10.0);
  return inst;
}

BenchmarkInstance build_strongly_convex(Index n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("build_strongly_convex: n >= 2");
  const Index k1 = std::max<Index>(1, n / 4);

  Mat A, B, H;
  Vec c, d;
  std::uint64_t used_seed = seed;
  bool ok = false;
  for (int attempt = 0; attempt < 8 && !ok; ++attempt, ++used_seed) {
    std::mt19937_64 rng(used_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto draw_mat = [&](Index rows, Index cols) {
      Mat m(rows, cols);
      for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
      return m;
    };
    A = draw_mat(k1, n);
    B = draw_mat(k1, n);
    H = draw_mat(k1, n);
    c.resize(n);
    d.resize(n);
    for (Index i = 0; i < n; ++i) c[i] = normal(rng);
    for (Index i = 0; i < n; ++i) d[i] = normal(rng);

    Eigen::ColPivHouseholderQR<Mat> qra(A.transpose());
    Eigen::ColPivHouseholderQR<Mat> qrb(B.transpose());
    if (qra.rank() < k1 || qrb.rank() < k1) continue;
    // Row-orthonormalize A so that AA' = I.
    Eigen::HouseholderQR<Mat> qr(A.transpose());
    Mat Q = qr.householderQ() * Mat::Identity(n, k1);
    A = Q.transpose();
    ok = true;
  }
  if (!ok)
    throw std::runtime_error(
        "build_strongly_convex: rank-deficient draws for 8 seeds in a row");

  BenchmarkInstance inst;
  inst.name = "strongly_convex";
  inst.seed = seed;

  auto data = std::make_shared<const std::tuple<Mat, Mat, Mat, Vec, Vec>>(
      A, B, H, c, d);
  const Mat& Ar = std::get<0>(*data);
  const Mat& Hr = std::get<2>(*data);

  BilevelProblem pb;
  pb.dim_x = n;
  pb.dim_y = n;
  pb.dim_g = 2 * k1;

  pb.eval_F = [data](const Vec& x, const Vec& y) {
    const Vec& c = std::get<3>(*data);
    const Vec& d = std::get<4>(*data);
    return std::sin(c.dot(x) + d.dot(y)) +
           std::log((x + y).squaredNorm() + 1.0);
  };
  pb.grad_F = [data](const Vec& x, const Vec& y) {
    const Vec& c = std::get<3>(*data);
    const Vec& d = std::get<4>(*data);
    const double s = std::cos(c.dot(x) + d.dot(y));
    const Vec q = 2.0 * (x + y) / ((x + y).squaredNorm() + 1.0);
    return GradPair{s * c + q, s * d + q};
  };
  pb.eval_f = [](const Vec& x, const Vec& y) {
    return 0.5 * (x - y).squaredNorm();
  };
  pb.grad_f = [](const Vec& x, const Vec& y) {
    return GradPair{x - y, y - x};
  };
  pb.eval_g = [data, k1](const Vec& x, const Vec& y) {
    const Vec v = std::get<0>(*data) * y + std::get<2>(*data) * x;
    Vec g(2 * k1);
    g << v, -v;
    return g;
  };
  pb.jac_g_x = [data, k1, n](const Vec&, const Vec&) {
    Mat j(2 * k1, n);
    j.topRows(k1) = std::get<2>(*data);
    j.bottomRows(k1) = -std::get<2>(*data);
    return j;
  };
  pb.jac_g_y = [data, k1, n](const Vec&, const Vec&) {
    Mat j(2 * k1, n);
    j.topRows(k1) = std::get<0>(*data);
    j.bottomRows(k1) = -std::get<0>(*data);
    return j;
  };
  pb.set_X = affine_subspace(std::get<1>(*data), Vec::Zero(k1));
  pb.set_Y = whole_space(n);
  pb.rho_f = 0.0;
  inst.problem = std::move(pb);

  Mat MC(2 * k1, 2 * n);
  MC.setZero();
  MC.topLeftCorner(k1, n) = std::get<1>(*data);          // B x = 0
  MC.bottomLeftCorner(k1, n) = Hr;                       // H x + A y = 0
  MC.bottomRightCorner(k1, n) = Ar;
  inst.set_C = affine_subspace(std::move(MC), Vec::Zero(2 * k1));

  SolverConfig cfg;
  cfg.gamma = {1.0, 1.0};
  cfg.r = 10.0;
  cfg.alpha = Schedule::constant(0.01);
  cfg.beta = Schedule::constant(0.01);
  cfg.eta = Schedule::constant(0.05);
  cfg.c_bar = 100.0;
  cfg.p_exp = 0.3;
  cfg.max_iters = 10000;
  cfg.residual_every = 100;
  inst.default_config = cfg;

  inst.moduli.L_F = c.squaredNorm() + d.squaredNorm() + 4.0;
  inst.moduli.L_f = 2.0;
  {
    Mat HA(k1, 2 * n);
    HA << Hr, Ar;
    Eigen::BDCSVD<Mat> svd(HA);
    inst.moduli.L_g = std::sqrt(2.0) * svd.singularValues()[0];
  }
  inst.moduli.L_g1 = 0.0;
  inst.moduli.L_g2 = 0.0;

  // y*(x) = x - A'(AA')^{-1}(A+H)x; AA' = I after orthonormalization.
  inst.ll_solution_map = [data](const Vec& x) -> Vec {
    const Mat& A = std::get<0>(*data);
    const Mat& H = std::get<2>(*data);
    return x - A.transpose() * (A * x + H * x);
  };
  inst.hyperobjective = [inst_f = inst.problem.eval_F,
                         map = inst.ll_solution_map](const Vec& x) {
    return inst_f(x, map(x));
  };

  inst.default_init_x = Vec::Constant(n, 5.0);
  inst.default_init_y = Vec::Constant(n, 5.0);
  return inst;
}

BenchmarkInstance build_scalar_testbed(bool constrained) {
  BenchmarkInstance inst;
  inst.name = constrained ? "scalar_testbed" : "scalar_testbed_unconstrained";

  BilevelProblem pb;
  pb.dim_x = 1;
  pb.dim_y = 1;
  pb.dim_g = constrained ? 1 : 0;

  pb.eval_F = [](const Vec& x, const Vec& y) {
    return 0.5 * (x[0] * x[0] + y[0] * y[0]);
  };
  pb.grad_F = [](const Vec& x, const Vec& y) { return GradPair{x, y}; };
  pb.eval_f = [](const Vec&, const Vec& y) { return 0.5 * y[0] * y[0]; };
  pb.grad_f = [](const Vec&, const Vec& y) {
    return GradPair{Vec::Zero(1), y};
  };
  if (constrained) {
    pb.eval_g = [](const Vec& x, const Vec& y) {
      Vec g(1);
      g << y[0] - x[0];
      return g;
    };
    pb.jac_g_x = [](const Vec&, const Vec&) {
      return Mat::Constant(1, 1, -1.0);
    };
    pb.jac_g_y = [](const Vec&, const Vec&) {
      return Mat::Constant(1, 1, 1.0);
    };
  }
  pb.set_X = whole_space(1);
  pb.set_Y = whole_space(1);
  pb.rho_f = 0.0;
  pb.F_lower = 0.0;
  inst.problem = std::move(pb);

  if (constrained) {
    Vec a(2);
    a << -1.0, 1.0;  // y - x <= 0
    inst.set_C = halfspace(std::move(a), 0.0);
  } else {
    inst.set_C = whole_space(2);
  }

  SolverConfig cfg;
  cfg.gamma = {1.0, 1.0};
  cfg.r = 10.0;
  cfg.alpha = Schedule::constant(0.01);
  cfg.beta = Schedule::constant(0.01);
  cfg.eta = Schedule::constant(0.05);
  cfg.c_bar = 1.0;
  cfg.p_exp = 0.3;
  cfg.max_iters = 1000;
  cfg.residual_every = 10;
  inst.default_config = cfg;

  inst.moduli.L_F = 1.0;
  inst.moduli.L_f = 1.0;
  inst.moduli.L_g = constrained ? std::sqrt(2.0) : 0.0;
  inst.moduli.L_g1 = 0.0;
  inst.moduli.L_g2 = 0.0;

  inst.known_x_star = Vec::Zero(1);
  if (constrained) {
    inst.ll_solution_map = [](const Vec& x) -> Vec {
      return Vec::Constant(1, std::min(x[0], 0.0));
    };
  } else {
    inst.ll_solution_map = [](const Vec&) -> Vec { return Vec::Zero(1); };
  }
  inst.hyperobjective = [F = inst.problem.eval_F,
                         map = inst.ll_solution_map](const Vec& x) {
    return F(x, map(x));
  };
  inst.default_init_x = Vec::Constant(1, -2.0);
  inst.default_init_y = Vec::Constant(1, 1.0);
  return inst;
}

MetricRecord metrics(const BenchmarkInstance& inst, const IterateState& s) {
  MetricRecord m;
  if (inst.known_x_star) {
    const double denom = inst.known_x_star->norm();
    const double dist = (s.x - *inst.known_x_star).norm();
    m.rel_x_err = denom > 0 ? dist / denom : dist;
  }
  if (inst.ll_solution_map)
    m.ll_err = (s.y - inst.ll_solution_map(s.x)).norm();
  if (inst.hyperobjective) m.hyper = inst.hyperobjective(s.x);
  return m;
}

}  // namespace lvhba::bench
