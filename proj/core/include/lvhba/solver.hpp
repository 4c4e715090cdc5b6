#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lvhba/constants.hpp"
#include "lvhba/valuefn.hpp"

namespace lvhba {

/// The outer update directions (d_x, d_y, d_z).
struct OuterDirections {
  Vec d_x;
  Vec d_y;
  Vec d_z;
};

/// One trace row. Cadenced diagnostics (gap, residual, merit) are present
/// exactly at iteration indices that are multiples of residual_every; they
/// are also skipped when the iterate is infeasible for C (possible only at
/// k = 0 when the initial point is not projected).
struct TraceRecord {
  long k = 0;
  double c_k = 0.0;
  double F = 0.0;
  double f = 0.0;
  std::optional<double> gap;       // f - v_{gamma,r}
  std::optional<double> residual;  // R_k
  std::optional<double> merit;     // V_k
  double dxy = 0.0;  // ||(x,y)_k - (x,y)_{k-1}||
  double dz = 0.0;   // ||z_k - z_{k-1}||
  double dtl = 0.0;  // ||(theta,lambda)_k - (theta,lambda)_{k-1}||
  double sec = 0.0;  // wall-clock seconds since run start
};

struct RunMetadata {
  std::string problem_name;
  SolverConfig config;
  unsigned long long seed = 0;
  long iterations_run = 0;
  bool stopped_early = false;
  std::string abort_reason;  // nonempty when the run aborted on an error
  std::vector<std::string> warnings;
};

struct Trace {
  std::vector<TraceRecord> records;
  RunMetadata meta;
};

struct RunHooks {
  /// Called on every recorded row with the full state; return false to stop.
  std::function<bool(const TraceRecord&, const IterateState&)> on_record;
};

/// Directions of the outer update (Algorithm line 4), evaluated at the
/// current (x,y,z) with the freshly updated inner pair (theta+, lambda+):
///   d_x = grad_x F/c_k + grad_x f(x,y) - grad_x f(x,th+) - lam+'grad_x g(x,th+)
///   d_y = grad_y F/c_k + grad_y f(x,y) - (y - th+)/gamma1
///   d_z = -(lam+ - z)/gamma2
OuterDirections outer_directions(const BilevelProblem& pb, const Vec& x,
                                 const Vec& y, const Vec& z,
                                 const Vec& theta_next, const Vec& lambda_next,
                                 double c_k, Gamma gamma);

/// One full LV-HBA iteration. The inner GDA step uses the current
/// (x^k, y^k, z^k); the outer projected update uses the new
/// (theta^{k+1}, lambda^{k+1}). This ordering is part of the algorithm.
IterateState lv_hba_step(const BilevelProblem& pb, const ConvexSet& set_C,
                         const IterateState& s, const SolverConfig& config);

/// Runs max_iters steps (or stops early on hooks / tolerances), recording a
/// trace. Deterministic: two runs with the same problem, config and initial
/// state produce identical numerical trajectories.
Trace run(const BilevelProblem& pb, const ConvexSet& set_C,
          const SolverConfig& config, const TheoryConstants& tc,
          IterateState init, const RunHooks& hooks = {});

/// Stationarity residual
///   R_k = dist(0, (grad F, 0) + c_k ((grad f, 0) - grad v) + N_{C x Z}),
/// computed as the tangent-cone residual on C x Z with the gradient of v from
/// the saddle oracle at saddle_tol.
double residual_Rk(const BilevelProblem& pb, const Vec& x, const Vec& y,
                   const Vec& z, double c_k, Gamma gamma, double r,
                   const ConvexSet& set_C, const ConvexSet& set_Z,
                   const TheoryConstants& tc, double saddle_tol);

/// Merit value
///   V_k = (F - F_lower)/c_k + f - v_{gamma,r}
///         + C_thetalambda ||(theta,lambda) - (theta*,lambda*)||^2.
double merit_Vk(const BilevelProblem& pb, const IterateState& s, double c_k,
                Gamma gamma, double r, const TheoryConstants& tc,
                double saddle_tol, double F_lower);

}  // namespace lvhba
