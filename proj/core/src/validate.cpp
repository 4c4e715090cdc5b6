#include "lvhba/validate.hpp"

#include <cmath>
#include <sstream>

#include "lvhba/valuefn.hpp"

namespace lvhba {

namespace {

constexpr double kFdStep = 1e-6;
constexpr double kFdRelTol = 1e-5;
constexpr double kMidpointTol = 1e-9;
constexpr int kMidpointPairs = 64;

std::string point_str(const Vec& v) {
  std::ostringstream os;
  os << "(";
  for (Index i = 0; i < std::min<Index>(v.size(), 4); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  if (v.size() > 4) os << ", ...";
  os << ")";
  return os.str();
}

double rel_err(const Vec& analytic, const Vec& fd) {
  const double scale = std::max(fd.norm(), 1e-8);
  return (analytic - fd).norm() / scale;
}

// Central finite differences of a scalar map along every coordinate.
template <class F>
Vec fd_gradient(F&& f, const Vec& at) {
  Vec g(at.size());
  Vec p = at;
  for (Index i = 0; i < at.size(); ++i) {
    const double save = p[i];
    p[i] = save + kFdStep;
    const double hi = f(p);
    p[i] = save - kFdStep;
    const double lo = f(p);
    p[i] = save;
    g[i] = (hi - lo) / (2.0 * kFdStep);
  }
  return g;
}

}  // namespace

Vec sample_point(const ConvexSet& set, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec w(dim(set));
  for (Index i = 0; i < w.size(); ++i) w[i] = scale * normal(rng);
  return project(set, w);
}

ValidationReport validate_problem(const BilevelProblem& pb, int samples,
                                  std::uint64_t seed) {
  check_problem_shape(pb);
  std::mt19937_64 rng(seed);
  ValidationReport report;

  auto run_check = [&](const std::string& name, auto&& body) {
    CheckResult res;
    res.name = name;
    res.pass = true;
    body(res);
    report.checks.push_back(std::move(res));
  };

  std::vector<std::pair<Vec, Vec>> probes;
  probes.reserve(samples);
  for (int i = 0; i < samples; ++i)
    probes.emplace_back(sample_point(pb.set_X, rng),
                        sample_point(pb.set_Y, rng));

  run_check("g_output_length", [&](CheckResult& res) {
    if (pb.dim_g == 0) return;
    for (const auto& [x, y] : probes) {
      const Vec g = pb.eval_g(x, y);
      if (g.size() != pb.dim_g) {
        res.pass = false;
        res.worst = static_cast<double>(g.size());
        res.witness = point_str(x) + " x " + point_str(y);
        return;
      }
    }
  });

  auto fd_check = [&](CheckResult& res, auto&& eval, auto&& grad) {
    for (const auto& [x, y] : probes) {
      Vec joint(x.size() + y.size());
      joint << x, y;
      const Vec fd = fd_gradient(
          [&](const Vec& w) {
            return eval(Vec(w.head(x.size())), Vec(w.tail(y.size())));
          },
          joint);
      const auto gp = grad(x, y);
      Vec an(x.size() + y.size());
      an << gp.x, gp.y;
      const double err = rel_err(an, fd);
      if (err > res.worst) {
        res.worst = err;
        res.witness = point_str(x) + " x " + point_str(y);
      }
      // Absolute slack keeps near-zero-gradient probes from false failures.
      if ((an - fd).norm() > kFdRelTol * std::max(1.0, fd.norm()))
        res.pass = false;
    }
  };

  run_check("grad_F_finite_difference", [&](CheckResult& res) {
    fd_check(res, pb.eval_F, pb.grad_F);
  });
  run_check("grad_f_finite_difference", [&](CheckResult& res) {
    fd_check(res, pb.eval_f, pb.grad_f);
  });

  run_check("jac_g_finite_difference", [&](CheckResult& res) {
    if (pb.dim_g == 0) return;
    for (const auto& [x, y] : probes) {
      const Mat jx = pb.jac_g_x(x, y);
      const Mat jy = pb.jac_g_y(x, y);
      for (Index i = 0; i < pb.dim_g; ++i) {
        Vec joint(x.size() + y.size());
        joint << x, y;
        const Vec fd = fd_gradient(
            [&](const Vec& w) {
              return pb.eval_g(w.head(x.size()), w.tail(y.size()))[i];
            },
            joint);
        Vec an(x.size() + y.size());
        an << jx.row(i).transpose(), jy.row(i).transpose();
        const double err = rel_err(an, fd);
        if (err > res.worst) {
          res.worst = err;
          res.witness = "row " + std::to_string(i) + " at " + point_str(x) +
                        " x " + point_str(y);
        }
        if ((an - fd).norm() > kFdRelTol * std::max(1.0, fd.norm()))
          res.pass = false;
      }
    }
  });

  // Midpoint convexity in y is a cheap necessary condition, not a proof.
  auto midpoint_check = [&](CheckResult& res, auto&& value) {
    for (const auto& [x, y_center] : probes) {
      for (int t = 0; t < kMidpointPairs; ++t) {
        const Vec y1 = sample_point(pb.set_Y, rng);
        const Vec y2 = sample_point(pb.set_Y, rng);
        const Vec mid = project(pb.set_Y, Vec(0.5 * (y1 + y2)));
        const double lhs = value(x, mid);
        const double rhs = 0.5 * (value(x, y1) + value(x, y2));
        const double gap = lhs - rhs;
        if (gap > res.worst) {
          res.worst = gap;
          res.witness = "x=" + point_str(x) + " y1=" + point_str(y1) +
                        " y2=" + point_str(y2);
        }
        if (gap > kMidpointTol) res.pass = false;
      }
    }
  };

  run_check("f_midpoint_convexity", [&](CheckResult& res) {
    midpoint_check(res, pb.eval_f);
  });

  run_check("g_midpoint_convexity", [&](CheckResult& res) {
    if (pb.dim_g == 0) return;
    for (Index i = 0; i < pb.dim_g; ++i) {
      CheckResult row;
      row.pass = true;
      midpoint_check(row, [&](const Vec& x, const Vec& y) {
        return pb.eval_g(x, y)[i];
      });
      if (row.worst > res.worst) {
        res.worst = row.worst;
        res.witness = "g_" + std::to_string(i) + ": " + row.witness;
      }
      if (!row.pass) res.pass = false;
    }
  });

  run_check("F_bounded_below", [&](CheckResult& res) {
    if (!pb.F_lower) return;
    for (const auto& [x, y] : probes) {
      const double gap = *pb.F_lower - pb.eval_F(x, y);
      if (gap > res.worst) {
        res.worst = gap;
        res.witness = point_str(x) + " x " + point_str(y);
      }
      if (gap > kMidpointTol) res.pass = false;
    }
  });

  return report;
}

}  // namespace lvhba
