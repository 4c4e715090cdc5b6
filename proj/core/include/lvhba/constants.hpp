#pragma once

#include "lvhba/config.hpp"
#include "lvhba/problem.hpp"

namespace lvhba {

/// User-supplied Lipschitz moduli of the problem data. Benchmarks ship exact
/// values; for user problems these are inputs, not estimated.
struct LipschitzModuli {
  double L_F = 0.0;   // smoothness of F
  double L_f = 0.0;   // smoothness of f
  double L_g = 0.0;   // Lipschitz modulus of g
  double L_g1 = 0.0;  // Lipschitz modulus of grad_x g
  double L_g2 = 0.0;  // Lipschitz modulus of grad_y g
};

/// Constants derived from the moduli and the proximal parameters. These feed
/// the inner step-size guard, the conservative outer step caps, and the
/// merit-function weight.
struct TheoryConstants {
  double rho_T = 0.0;           // min{1/gamma1 - rho_f, 1/gamma2}
  double L_B = 0.0;             // Lipschitz modulus of the saddle operator
  double C_Z = 0.0;             // max_{z in Z} ||z|| = r * sqrt(p)
  double L_vz = 0.0;            // z-smoothness of the value function
  double C_thetalambda = 0.0;   // merit-function weight
  double L_thetalambda = 0.0;   // Lipschitz modulus of the saddle map
  double rho_v = 0.0;           // weak convexity of v in (x,y)

  LipschitzModuli moduli;
  Gamma gamma;
  double r = 0.0;
  Index p = 0;

  /// Upper end of the inner step guard (0, rho_T / L_B^2).
  double eta_guard() const { return rho_T / (L_B * L_B); }

  /// The fixed inner step used by the saddle oracle, 0.9 * rho_T / L_B^2.
  double inner_step() const { return 0.9 * eta_guard(); }

  /// Smoothness of the penalized objective at penalty c_k.
  double L_phi(double c_k) const {
    return moduli.L_F / c_k + moduli.L_f + rho_v;
  }

  /// Conservative ("theory mode") outer step caps for a run with inner steps
  /// bounded below by eta_lb and initial penalty c0.
  double alpha_cap(double eta_lb, double c0) const;
  double beta_cap(double eta_lb) const;
};

/// Evaluates the closed-form constants. Throws std::invalid_argument when
/// gamma1 >= 1/rho_f (the differentiability precondition) or gamma2 <= 0.
TheoryConstants derive_constants(const BilevelProblem& pb,
                                 const SolverConfig& config,
                                 const LipschitzModuli& moduli);

}  // namespace lvhba
