#pragma once

#include <vector>

#include "chcrit/grid.hpp"
#include "chcrit/model.hpp"

namespace chcrit {

// Closed polyline in unwrapped domain coordinates (closure edge implicit).
struct Loop {
  std::vector<double> x, y;
  bool wraps_torus = false;
};

struct Contour {
  double level = 0.0;
  std::vector<Loop> loops;
};

// Cyclic shift placing the global argmax (argmin) at (n/2, n/2), index ties
// broken lexicographically.
Field recenter_at_max(const Field& u);
Field recenter_at_min(const Field& u);

// Marching squares with linear edge interpolation and periodic stitching;
// ambiguous cells resolved by the cell-average rule. Requires
// min(u) < t < max(u). Loops with fewer than 3 vertices are dropped.
Contour contour(const Field& u, double t);

// True iff the significant consecutive-edge cross products share one sign and
// the total turning is +-2pi within 1e-6. Cross products with magnitude at
// most tol*scale^2 (scale = bounding-box extent) are ignored.
bool is_convex(const std::vector<double>& x, const std::vector<double>& y, double tol = 1e-6);
bool is_convex(const Loop& loop, double tol = 1e-6);

struct ConvexityReport {
  std::vector<double> levels;
  std::vector<char> superlevel_convex;
  std::vector<char> sublevel_convex;
  std::vector<char> superlevel_multi;   // multi-component flags
  std::vector<char> sublevel_multi;
  double t_star_lo = 0.0, t_star_hi = 0.0;  // bracket for the convexity transition
};

// Scans n_levels uniform levels in (min+eps, max-eps); superlevel sets are
// tested on the max-recentered field, sublevel sets on the min-recentered
// one. A level counts as convex only when its contour is a single
// non-wrapping convex loop enclosing the recentered extremum.
ConvexityReport convexity_scan(const Field& u, int n_levels);

struct RayViolation {
  int ray = 0;
  double t = 0.0;        // arclength along the ray
  double increase = 0.0;
};

// Samples n_rays equiangular rays from the recentered max at spacing h/2 out
// to the fundamental-domain boundary (bilinear interpolation) and records
// every increase beyond tol. tol < 0 selects the default 1e-8 * (max - min).
std::vector<RayViolation> ray_monotonicity(const Field& u, int n_rays, double tol = -1.0);

struct H2Row {
  double c = 0.0, f = 0.0, fp = 0.0;
};

struct H2Report {
  std::vector<H2Row> rows;
  bool h2_holds = false;
  double lambda_phi = 0.0;
  double u_max = 0.0;
};

// Evaluates f(c) = G'(c)/phi^2 + lambda_phi/phi and f'(c) = G''(c)/phi^2
// (lambda_omega = 0) on n_levels points of (c_star, max u); h2_holds iff all
// f > 0 and f' > 0. Throws when c_star >= max(u).
H2Report h2_scan(const Field& u, const Model& m, double c_star, int n_levels);

}  // namespace chcrit
