#include "lvhba/constants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lvhba {

void SolverConfig::validate() const {
  if (gamma.gamma1 <= 0 || gamma.gamma2 <= 0)
    throw std::invalid_argument("config: gamma1 and gamma2 must be positive");
  if (r <= 0) throw std::invalid_argument("config: r must be positive");
  if (c_bar <= 0) throw std::invalid_argument("config: c_bar must be positive");
  if (!(p_exp > 0.0 && p_exp < 0.5))
    throw std::invalid_argument("config: p_exp must lie in (0, 1/2)");
  if (max_iters < 0)
    throw std::invalid_argument("config: max_iters must be nonnegative");
  if (saddle_oracle_tol <= 0)
    throw std::invalid_argument("config: saddle_oracle_tol must be positive");
  if (residual_every <= 0)
    throw std::invalid_argument("config: residual_every must be positive");
  if (record_every <= 0)
    throw std::invalid_argument("config: record_every must be positive");
  if (residual_every % record_every != 0)
    throw std::invalid_argument(
        "config: residual_every must be a multiple of record_every");
  for (long k : {0L, 1L, 7L}) {
    if (alpha(k) <= 0 || beta(k) <= 0 || eta(k) <= 0)
      throw std::invalid_argument("config: step schedules must stay positive");
    if (penalty(k + 1) < penalty(k))
      throw std::invalid_argument("config: penalty schedule must not decrease");
  }
}

double TheoryConstants::alpha_cap(double eta_lb, double c0) const {
  const double C_alpha =
      L_phi(c0) / 2.0 +
      eta_lb * rho_T * L_thetalambda * L_thetalambda /
          (4.0 * gamma.gamma2 * gamma.gamma2) +
      (1.0 + 2.0 / (eta_lb * rho_T)) * L_thetalambda * L_thetalambda *
          C_thetalambda;
  return std::min(eta_lb * rho_T / 4.0, 1.0 / (4.0 * C_alpha));
}

double TheoryConstants::beta_cap(double eta_lb) const {
  const double C_beta =
      L_vz / 2.0 + (1.0 + 2.0 / (eta_lb * rho_T)) * L_thetalambda *
                       L_thetalambda * C_thetalambda;
  return std::min(eta_lb * rho_T / 4.0, 1.0 / (4.0 * C_beta));
}

TheoryConstants derive_constants(const BilevelProblem& pb,
                                 const SolverConfig& config,
                                 const LipschitzModuli& moduli) {
  const double g1 = config.gamma.gamma1;
  const double g2 = config.gamma.gamma2;
  if (g2 <= 0) throw std::invalid_argument("derive_constants: gamma2 <= 0");
  if (g1 <= 0) throw std::invalid_argument("derive_constants: gamma1 <= 0");
  if (pb.rho_f < 0)
    throw std::invalid_argument("derive_constants: rho_f must be nonnegative");
  if (pb.rho_f > 0 && g1 >= 1.0 / pb.rho_f)
    throw std::invalid_argument(
        "derive_constants: gamma1 >= 1/rho_f violates the differentiability "
        "precondition");
  if (moduli.L_F < 0 || moduli.L_f < 0 || moduli.L_g < 0 || moduli.L_g1 < 0 ||
      moduli.L_g2 < 0)
    throw std::invalid_argument("derive_constants: moduli must be nonnegative");

  TheoryConstants tc;
  tc.moduli = moduli;
  tc.gamma = config.gamma;
  tc.r = config.r;
  tc.p = pb.dim_g;

  tc.rho_T = std::min(1.0 / g1 - pb.rho_f, 1.0 / g2);
  tc.C_Z = config.r * std::sqrt(static_cast<double>(pb.dim_g));
  tc.L_B = std::max(moduli.L_f + moduli.L_g + tc.C_Z * moduli.L_g2 + 1.0 / g1,
                    moduli.L_g + 1.0 / g2);
  tc.L_vz = (g2 * tc.rho_T + 1.0) / (g2 * g2 * tc.rho_T);
  const double a = moduli.L_f + tc.C_Z * moduli.L_g1;
  tc.C_thetalambda = std::max(a * a + 1.0 / (2.0 * g1 * g1) +
                                  moduli.L_g * moduli.L_g,
                              1.0 / (g2 * g2));
  tc.L_thetalambda =
      std::sqrt(3.0) *
      std::max({moduli.L_f + tc.C_Z * moduli.L_g2 + moduli.L_g, 1.0 / g1,
                1.0 / g2}) /
      tc.rho_T;
  tc.rho_v = pb.rho_f / (1.0 - g1 * pb.rho_f);
  return tc;
}

}  // namespace lvhba
