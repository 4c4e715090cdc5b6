#pragma once

#include <variant>
#include <vector>

#include <Eigen/Cholesky>

#include "lvhba/types.hpp"

namespace lvhba {

struct ConvexSet;

/// R^d, projection is the identity.
struct WholeSpace {
  Index dim = 0;
};

/// { w : lo <= w <= hi } componentwise; entries may be +-infinity.
struct Box {
  Vec lo;
  Vec hi;
};

/// { w : a'w = b }, a != 0.
struct Hyperplane {
  Vec a;
  double b = 0.0;
};

/// { w : a'w <= b }, a != 0.
struct Halfspace {
  Vec a;
  double b = 0.0;
};

/// { w : M w = c } with M full row rank; MM' is factorized at construction.
struct AffineSubspace {
  Mat M;
  Vec c;
  Eigen::LLT<Mat> mmt;  // cached factorization of M*M'

  AffineSubspace(Mat M_in, Vec c_in);
};

/// Euclidean ball { w : ||w - center|| <= radius }.
struct Ball {
  Vec center;
  double radius = 0.0;
};

/// Intersection of members, projected with Dykstra's algorithm.
struct Intersection {
  std::vector<ConvexSet> members;
  int dykstra_iters = 500;
  double dykstra_tol = 1e-10;
};

/// Cartesian product of members (used for Y x Z and C x Z).
struct Product {
  std::vector<ConvexSet> members;
};

struct ConvexSet {
  std::variant<WholeSpace, Box, Hyperplane, Halfspace, AffineSubspace, Ball,
               Intersection, Product>
      node;
};

ConvexSet whole_space(Index dim);
ConvexSet box(Vec lo, Vec hi);
ConvexSet hyperplane(Vec a, double b);
ConvexSet halfspace(Vec a, double b);
ConvexSet affine_subspace(Mat M, Vec c);
ConvexSet ball(Vec center, double radius);
ConvexSet intersection(std::vector<ConvexSet> members, int dykstra_iters = 500,
                       double dykstra_tol = 1e-10);
ConvexSet product(std::vector<ConvexSet> members);

/// The multiplier box Z = [0, r]^p.
ConvexSet multiplier_box(Index p, double r);

Index dim(const ConvexSet& set);

/// Euclidean projection argmin_{u in S} ||u - w||. Exact closed form for all
/// leaves; Dykstra's algorithm for intersections; blockwise for products.
Vec project(const ConvexSet& set, const Vec& w);

struct Containment {
  bool inside = false;
  double violation = 0.0;  // worst violated inequality/equality magnitude
};

Containment contains(const ConvexSet& set, const Vec& w, double tol);

/// dist(0, d + N_S(w)) = || Proj_{T_S(w)}(-d) ||, the stationarity measure of
/// a direction d at a feasible point w. Requires w in S within act_tol.
/// Intersections have no analytic tangent cone here and are rejected.
double tangent_residual(const ConvexSet& set, const Vec& w, const Vec& d,
                        double act_tol = 1e-8);

}  // namespace lvhba
