#pragma once

#include "lvhba/types.hpp"

namespace lvhba {

/// The algorithm state (x^k, y^k, z^k, theta^k, lambda^k) at iteration k.
struct IterateState {
  Vec x;       // upper-level variable, R^n
  Vec y;       // lower-level variable, R^m
  Vec z;       // multiplier anchor, in Z = [0,r]^p
  Vec theta;   // running inner primal iterate, in Y
  Vec lambda;  // running inner dual iterate, in Z
  long k = 0;
};

}  // namespace lvhba
