#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lvhba/problem.hpp"

namespace lvhba {

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;      // worst observed violation / relative error
  std::string witness;     // where the worst case happened
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Screens the problem oracles against the standing assumptions: gradient
/// agreement with central finite differences (relative error <= 1e-5 at
/// h = 1e-6), randomized midpoint convexity of f(x,.) and each g_i(x,.)
/// (64 pairs per sample, absolute tolerance 1e-9), and F >= F_lower when a
/// bound is supplied. Violations are reported, not thrown.
ValidationReport validate_problem(const BilevelProblem& pb, int samples,
                                  std::uint64_t seed);

/// Draws a point of the set by projecting a scaled Gaussian sample.
Vec sample_point(const ConvexSet& set, std::mt19937_64& rng, double scale = 2.0);

}  // namespace lvhba
