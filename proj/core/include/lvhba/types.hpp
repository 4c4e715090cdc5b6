#pragma once

#include <Eigen/Core>

namespace lvhba {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Proximal parameters gamma = (gamma1, gamma2) of the value function.
struct Gamma {
  double gamma1 = 1.0;
  double gamma2 = 1.0;
};

/// A gradient split into its x- and y-blocks.
struct GradPair {
  Vec x;
  Vec y;
};

}  // namespace lvhba
