#include "lvhba/sets.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/QR>

namespace lvhba {

namespace {

[[noreturn]] void dim_error(const char* what, Index expect, Index got) {
  throw std::invalid_argument(std::string(what) + ": expected dimension " +
                              std::to_string(expect) + ", got " +
                              std::to_string(got));
}

void require_dim(const ConvexSet& set, const Vec& w, const char* what) {
  if (dim(set) != w.size()) dim_error(what, dim(set), w.size());
}

}  // namespace

AffineSubspace::AffineSubspace(Mat M_in, Vec c_in)
    : M(std::move(M_in)), c(std::move(c_in)) {
  if (M.rows() == 0 || M.cols() == 0)
    throw std::invalid_argument("AffineSubspace: empty constraint matrix");
  if (c.size() != M.rows())
    dim_error("AffineSubspace rhs", M.rows(), c.size());
  Eigen::ColPivHouseholderQR<Mat> qr(M);
  if (qr.rank() < M.rows())
    throw std::invalid_argument("AffineSubspace: M is not full row rank");
  mmt.compute(M * M.transpose());
  if (mmt.info() != Eigen::Success)
    throw std::invalid_argument("AffineSubspace: MM' factorization failed");
}

ConvexSet whole_space(Index d) { return {WholeSpace{d}}; }

ConvexSet box(Vec lo, Vec hi) {
  if (lo.size() != hi.size()) dim_error("box bounds", lo.size(), hi.size());
  for (Index i = 0; i < lo.size(); ++i)
    if (lo[i] > hi[i])
      throw std::invalid_argument("box: lo > hi at component " +
                                  std::to_string(i));
  return {Box{std::move(lo), std::move(hi)}};
}

ConvexSet hyperplane(Vec a, double b) {
  if (a.norm() == 0.0) throw std::invalid_argument("hyperplane: a = 0");
  return {Hyperplane{std::move(a), b}};
}

ConvexSet halfspace(Vec a, double b) {
  if (a.norm() == 0.0) throw std::invalid_argument("halfspace: a = 0");
  return {Halfspace{std::move(a), b}};
}

ConvexSet affine_subspace(Mat M, Vec c) {
  return {AffineSubspace(std::move(M), std::move(c))};
}

ConvexSet ball(Vec center, double radius) {
  if (radius < 0) throw std::invalid_argument("ball: negative radius");
  return {Ball{std::move(center), radius}};
}

ConvexSet intersection(std::vector<ConvexSet> members, int dykstra_iters,
                       double dykstra_tol) {
  if (members.empty())
    throw std::invalid_argument("intersection: no members");
  const Index d = dim(members.front());
  for (const auto& m : members)
    if (dim(m) != d) dim_error("intersection member", d, dim(m));
  return {Intersection{std::move(members), dykstra_iters, dykstra_tol}};
}

ConvexSet product(std::vector<ConvexSet> members) {
  return {Product{std::move(members)}};
}

ConvexSet multiplier_box(Index p, double r) {
  if (r <= 0) throw std::invalid_argument("multiplier_box: r must be positive");
  return box(Vec::Zero(p), Vec::Constant(p, r));
}

Index dim(const ConvexSet& set) {
  return std::visit(
      [](const auto& s) -> Index {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeSpace>) return s.dim;
        else if constexpr (std::is_same_v<T, Box>) return s.lo.size();
        else if constexpr (std::is_same_v<T, Hyperplane>) return s.a.size();
        else if constexpr (std::is_same_v<T, Halfspace>) return s.a.size();
        else if constexpr (std::is_same_v<T, AffineSubspace>) return s.M.cols();
        else if constexpr (std::is_same_v<T, Ball>) return s.center.size();
        else if constexpr (std::is_same_v<T, Intersection>)
          return dim(s.members.front());
        else {
          Index d = 0;
          for (const auto& m : s.members) d += dim(m);
          return d;
        }
      },
      set.node);
}

namespace {

Vec project_impl(const WholeSpace&, const Vec& w) { return w; }

Vec project_impl(const Box& s, const Vec& w) {
  return w.cwiseMax(s.lo).cwiseMin(s.hi);
}

Vec project_impl(const Hyperplane& s, const Vec& w) {
  return w - ((s.a.dot(w) - s.b) / s.a.squaredNorm()) * s.a;
}

Vec project_impl(const Halfspace& s, const Vec& w) {
  const double viol = s.a.dot(w) - s.b;
  if (viol <= 0) return w;
  return w - (viol / s.a.squaredNorm()) * s.a;
}

Vec project_impl(const AffineSubspace& s, const Vec& w) {
  return w - s.M.transpose() * s.mmt.solve(s.M * w - s.c);
}

Vec project_impl(const Ball& s, const Vec& w) {
  const Vec diff = w - s.center;
  const double n = diff.norm();
  if (n <= s.radius) return w;
  if (n == 0.0) return s.center;  // radius 0
  return s.center + (s.radius / n) * diff;
}

Vec project_impl(const Intersection& s, const Vec& w) {
  // Dykstra: the limit is the projection onto the intersection, which plain
  // alternating projection does not give for general convex members.
  const Index d = w.size();
  const std::size_t k = s.members.size();
  std::vector<Vec> corr(k, Vec::Zero(d));
  Vec u = w;
  for (int it = 0; it < s.dykstra_iters; ++it) {
    double cycle_change = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const Vec target = u + corr[i];
      const Vec next = project(s.members[i], target);
      corr[i] = target - next;
      cycle_change += (next - u).norm();
      u = next;
    }
    if (cycle_change <= s.dykstra_tol) return u;
  }
  throw std::runtime_error(
      "Dykstra projection did not converge; intersection may be ill-posed");
}

Vec project_impl(const Product& s, const Vec& w) {
  Vec out(w.size());
  Index off = 0;
  for (const auto& m : s.members) {
    const Index d = dim(m);
    out.segment(off, d) = project(m, w.segment(off, d));
    off += d;
  }
  return out;
}

}  // namespace

Vec project(const ConvexSet& set, const Vec& w) {
  require_dim(set, w, "project");
  return std::visit([&](const auto& s) { return project_impl(s, w); },
                    set.node);
}

namespace {

Containment contains_impl(const WholeSpace&, const Vec&) { return {true, 0.0}; }

Containment contains_impl(const Box& s, const Vec& w) {
  double worst = 0.0;
  for (Index i = 0; i < w.size(); ++i) {
    worst = std::max(worst, s.lo[i] - w[i]);
    worst = std::max(worst, w[i] - s.hi[i]);
  }
  return {false, worst};  // caller applies tol
}

Containment contains_impl(const Hyperplane& s, const Vec& w) {
  return {false, std::abs(s.a.dot(w) - s.b)};
}

Containment contains_impl(const Halfspace& s, const Vec& w) {
  return {false, std::max(0.0, s.a.dot(w) - s.b)};
}

Containment contains_impl(const AffineSubspace& s, const Vec& w) {
  return {false, (s.M * w - s.c).cwiseAbs().maxCoeff()};
}

Containment contains_impl(const Ball& s, const Vec& w) {
  return {false, std::max(0.0, (w - s.center).norm() - s.radius)};
}

Containment contains_impl(const Intersection& s, const Vec& w) {
  double worst = 0.0;
  for (const auto& m : s.members)
    worst = std::max(worst, contains(m, w, 0.0).violation);
  return {false, worst};
}

Containment contains_impl(const Product& s, const Vec& w) {
  double worst = 0.0;
  Index off = 0;
  for (const auto& m : s.members) {
    const Index d = dim(m);
    worst = std::max(worst, contains(m, w.segment(off, d), 0.0).violation);
    off += d;
  }
  return {false, worst};
}

}  // namespace

Containment contains(const ConvexSet& set, const Vec& w, double tol) {
  require_dim(set, w, "contains");
  Containment c =
      std::visit([&](const auto& s) { return contains_impl(s, w); }, set.node);
  c.inside = c.violation <= tol;
  return c;
}

namespace {

double tangent_sq(const ConvexSet& set, const Vec& w, const Vec& d,
                  double act_tol);

double tangent_sq_impl(const WholeSpace&, const Vec&, const Vec& d, double) {
  return d.squaredNorm();
}

double tangent_sq_impl(const Box& s, const Vec& w, const Vec& d,
                       double act_tol) {
  // Tangent cone is a componentwise interval cone; project -d onto it.
  double sq = 0.0;
  for (Index i = 0; i < w.size(); ++i) {
    const bool at_lo = w[i] - s.lo[i] <= act_tol;
    const bool at_hi = s.hi[i] - w[i] <= act_tol;
    double t = -d[i];
    if (at_lo && at_hi) t = 0.0;        // pinned component
    else if (at_lo) t = std::max(t, 0.0);
    else if (at_hi) t = std::min(t, 0.0);
    sq += t * t;
  }
  return sq;
}

double tangent_sq_impl(const Hyperplane& s, const Vec&, const Vec& d, double) {
  // Tangent space is the null space of a'.
  const Vec t = -d + (s.a.dot(d) / s.a.squaredNorm()) * s.a;
  return t.squaredNorm();
}

double tangent_sq_impl(const Halfspace& s, const Vec& w, const Vec& d,
                       double act_tol) {
  if (s.b - s.a.dot(w) > act_tol) return d.squaredNorm();  // inactive
  // Active: tangent cone { v : a'v <= 0 }.
  Vec t = -d;
  const double an = s.a.dot(t);
  if (an > 0) t -= (an / s.a.squaredNorm()) * s.a;
  return t.squaredNorm();
}

double tangent_sq_impl(const AffineSubspace& s, const Vec&, const Vec& d,
                       double) {
  const Vec t = -d + s.M.transpose() * s.mmt.solve(s.M * d);
  return t.squaredNorm();
}

double tangent_sq_impl(const Ball& s, const Vec& w, const Vec& d,
                       double act_tol) {
  const Vec normal = w - s.center;
  if (s.radius - normal.norm() > act_tol) return d.squaredNorm();  // interior
  Vec t = -d;
  const double an = normal.dot(t);
  if (an > 0) t -= (an / normal.squaredNorm()) * normal;
  return t.squaredNorm();
}

double tangent_sq_impl(const Intersection&, const Vec&, const Vec&, double) {
  throw std::invalid_argument(
      "tangent_residual: intersections are not supported analytically; "
      "supply an equivalent box/affine model instead");
}

double tangent_sq_impl(const Product& s, const Vec& w, const Vec& d,
                       double act_tol) {
  double sq = 0.0;
  Index off = 0;
  for (const auto& m : s.members) {
    const Index n = dim(m);
    sq += tangent_sq(m, w.segment(off, n), d.segment(off, n), act_tol);
    off += n;
  }
  return sq;
}

double tangent_sq(const ConvexSet& set, const Vec& w, const Vec& d,
                  double act_tol) {
  return std::visit(
      [&](const auto& s) { return tangent_sq_impl(s, w, d, act_tol); },
      set.node);
}

}  // namespace

double tangent_residual(const ConvexSet& set, const Vec& w, const Vec& d,
                        double act_tol) {
  require_dim(set, w, "tangent_residual");
  require_dim(set, d, "tangent_residual direction");
  const Containment c = contains(set, w, act_tol);
  if (!c.inside)
    throw std::invalid_argument(
        "tangent_residual: point is not in the set (violation " +
        std::to_string(c.violation) + ")");
  return std::sqrt(tangent_sq(set, w, d, act_tol));
}

}  // namespace lvhba
