#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lvhba/constants.hpp"
#include "lvhba/solver.hpp"

namespace lvhba::bench {

/// A benchmark problem together with its projection model of
/// C = {(x,y) in X x Y : g(x,y) <= 0}, exact moduli, reference solution data
/// and the run settings used for it.
struct BenchmarkInstance {
  std::string name;
  BilevelProblem problem;
  ConvexSet set_C{WholeSpace{0}};
  SolverConfig default_config;
  LipschitzModuli moduli;

  std::optional<Vec> known_x_star;
  std::function<Vec(const Vec&)> ll_solution_map;      // y*(x), when unique
  std::function<double(const Vec&)> hyperobjective;    // F(x, y*(x))

  Vec default_init_x;
  Vec default_init_y;
  unsigned long long seed = 0;

  TheoryConstants constants() const {
    return derive_constants(problem, default_config, moduli);
  }
};

/// Coupling-equality problem with a merely convex lower level:
///   F = ||x - y2||^2/2 + ||y1 - 1||^2/2,
///   f = ||y1||^2/2 - x'y1 + 1'y2,  1'x + 1'y1 + 1'y2 = 0,
/// whose solution is x* = -0.3 1, y1* = 0.7 1, y2* = -0.4 1. The equality is
/// carried as two opposing inequality rows (p = 2); C is the hyperplane.
BenchmarkInstance build_merely_convex(Index n);

/// Strongly convex lower level min ||x-y||^2/2 over {Ay + Hx = 0} with
/// X = {Bx = 0}, F = sin(c'x + d'y) + ln(||x+y||^2 + 1). A, B, H, c, d are
/// seeded standard normal draws (A row-orthonormalized, n/4 rows each);
/// y*(x) = x - A'(AA')^{-1}(A+H)x is the exact affine solution map.
BenchmarkInstance build_strongly_convex(Index n, std::uint64_t seed);

/// One-dimensional diagnostic problem: F = (x^2+y^2)/2, f = y^2/2, g = y - x,
/// C = {y <= x}. Its saddle point has a closed form, making it the reference
/// fixture for the value-function operations. With `constrained = false` the
/// constraint is dropped (p = 0) and the value function degenerates to a
/// Moreau envelope.
BenchmarkInstance build_scalar_testbed(bool constrained = true);

struct MetricRecord {
  std::optional<double> rel_x_err;  // ||x - x*|| / ||x*||
  std::optional<double> ll_err;     // ||y - y*(x)||
  std::optional<double> hyper;      // F(x, y*(x))
};

/// Point metrics against the instance references; metrics without the needed
/// reference are left unset rather than raising.
MetricRecord metrics(const BenchmarkInstance& inst, const IterateState& s);

/// Hook adapter accumulating metric series along a run, plus the first
/// iteration at which rel_x_err <= threshold.
struct MetricsTracker {
  explicit MetricsTracker(const BenchmarkInstance& inst,
                          double threshold = 1e-2)
      : inst_(&inst), threshold_(threshold) {}

  bool operator()(const TraceRecord& rec, const IterateState& s) {
    const MetricRecord m = metrics(*inst_, s);
    if (m.rel_x_err) {
      rel_x_err.emplace_back(rec.k, *m.rel_x_err);
      if (!iters_to_threshold && *m.rel_x_err <= threshold_)
        iters_to_threshold = rec.k;
    }
    if (m.ll_err) ll_err.emplace_back(rec.k, *m.ll_err);
    if (m.hyper) hyper.emplace_back(rec.k, *m.hyper);
    return true;
  }

  std::vector<std::pair<long, double>> rel_x_err;
  std::vector<std::pair<long, double>> ll_err;
  std::vector<std::pair<long, double>> hyper;
  std::optional<long> iters_to_threshold;

 private:
  const BenchmarkInstance* inst_;
  double threshold_;
};

}  // namespace lvhba::bench
