#include "chcrit/levelset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "chcrit/energy.hpp"
#include "chcrit/parallel.hpp"
#include "chcrit/spectral.hpp"

namespace chcrit {

namespace {

Field recenter(const Field& u, bool at_max) {
  int n = u.n();
  int bi = 0, bj = 0;
  double best = u.at(0, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = u.at(i, j);
      if (at_max ? v > best : v < best) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  return cyclic_shift(u, n / 2 - bi, n / 2 - bj);
}

// Intersection point and stitching slots of one grid edge. Edge ids:
// 2*(i*n+j) for the edge (i,j)-(i+1,j), +1 for (i,j)-(i,j+1), wrapped mod n.
struct EdgeNode {
  double x = 0.0, y = 0.0;
  int nb[2] = {-1, -1};
};

void link(std::unordered_map<int, EdgeNode>& nodes, int a, int b) {
  auto& ea = nodes.at(a);
  auto& eb = nodes.at(b);
  ea.nb[ea.nb[0] < 0 ? 0 : 1] = b;
  eb.nb[eb.nb[0] < 0 ? 0 : 1] = a;
}

}  // namespace

Field recenter_at_max(const Field& u) { return recenter(u, true); }
Field recenter_at_min(const Field& u) { return recenter(u, false); }

Contour contour(const Field& u, double t) {
  auto [mn, mx] = std::minmax_element(u.values.begin(), u.values.end());
  if (!(*mn < t && t < *mx)) throw std::invalid_argument("contour: level outside field range");

  int n = u.n();
  double h = u.grid.h();
  double side = u.grid.side;
  std::unordered_map<int, EdgeNode> nodes;

  auto touch = [&](int id) {
    auto [it, fresh] = nodes.try_emplace(id);
    if (fresh) {
      int cell = id >> 1, a = cell / n, b = cell % n;
      double v0 = u.at(a, b);
      if (id & 1) {
        double v1 = u.at(a, (b + 1) % n);
        it->second.x = u.grid.coord(a);
        it->second.y = u.grid.coord(b) + h * (t - v0) / (v1 - v0);
      } else {
        double v1 = u.at((a + 1) % n, b);
        it->second.x = u.grid.coord(a) + h * (t - v0) / (v1 - v0);
        it->second.y = u.grid.coord(b);
      }
    }
    return id;
  };

  // Per-mask segments between local edges 0=(c0,c1), 1=(c1,c2), 2=(c3,c2),
  // 3=(c0,c3); corners c0=(i,j), c1=(i+1,j), c2=(i+1,j+1), c3=(i,j+1).
  // Masks 5 and 10 defer to the cell average.
  static const std::array<std::array<int, 4>, 16> table = {{
      {-1, -1, -1, -1}, {0, 3, -1, -1}, {0, 1, -1, -1}, {1, 3, -1, -1},
      {1, 2, -1, -1},   {-2, -2, -2, -2}, {0, 2, -1, -1}, {2, 3, -1, -1},
      {2, 3, -1, -1},   {0, 2, -1, -1}, {-2, -2, -2, -2}, {1, 2, -1, -1},
      {1, 3, -1, -1},   {0, 1, -1, -1}, {0, 3, -1, -1}, {-1, -1, -1, -1},
  }};

  for (int i = 0; i < n; ++i) {
    int ip = (i + 1) % n;
    for (int j = 0; j < n; ++j) {
      int jp = (j + 1) % n;
      double v0 = u.at(i, j), v1 = u.at(ip, j), v2 = u.at(ip, jp), v3 = u.at(i, jp);
      int mask = (v0 > t) | (v1 > t) << 1 | (v2 > t) << 2 | (v3 > t) << 3;
      if (mask == 0 || mask == 15) continue;
      int ge[4] = {2 * (i * n + j), 2 * (ip * n + j) + 1, 2 * (i * n + jp), 2 * (i * n + j) + 1};
      std::array<int, 4> seg = table[mask];
      if (seg[0] == -2) {
        bool center_in = 0.25 * (v0 + v1 + v2 + v3) > t;
        bool isolate_odd = (mask == 5) == center_in;  // arcs around c1 and c3
        seg = isolate_odd ? std::array<int, 4>{0, 1, 2, 3} : std::array<int, 4>{0, 3, 1, 2};
      }
      for (int k = 0; k < 4 && seg[k] >= 0; k += 2)
        link(nodes, touch(ge[seg[k]]), touch(ge[seg[k + 1]]));
    }
  }

  std::vector<int> ids;
  ids.reserve(nodes.size());
  for (const auto& [id, node] : nodes) ids.push_back(id);
  std::sort(ids.begin(), ids.end());

  Contour out;
  out.level = t;
  std::unordered_map<int, char> seen;
  for (int start : ids) {
    if (seen.count(start)) continue;
    std::vector<double> rx, ry;
    int prev = -1, cur = start;
    do {
      seen[cur] = 1;
      const EdgeNode& e = nodes.at(cur);
      rx.push_back(e.x);
      ry.push_back(e.y);
      int next = e.nb[0] != prev ? e.nb[0] : e.nb[1];
      prev = cur;
      cur = next;
    } while (cur != start && cur >= 0);
    if (rx.size() < 3) continue;

    Loop loop;
    loop.x.resize(rx.size());
    loop.y.resize(ry.size());
    loop.x[0] = rx[0];
    loop.y[0] = ry[0];
    auto unwrap = [&](double d) {
      while (d > 0.5 * side) d -= side;
      while (d < -0.5 * side) d += side;
      return d;
    };
    for (std::size_t k = 1; k < rx.size(); ++k) {
      loop.x[k] = loop.x[k - 1] + unwrap(rx[k] - rx[k - 1]);
      loop.y[k] = loop.y[k - 1] + unwrap(ry[k] - ry[k - 1]);
    }
    double cx = loop.x.back() + unwrap(rx[0] - rx.back());
    double cy = loop.y.back() + unwrap(ry[0] - ry.back());
    loop.wraps_torus = std::lround((cx - loop.x[0]) / side) != 0 ||
                       std::lround((cy - loop.y[0]) / side) != 0;
    out.loops.push_back(std::move(loop));
  }
  return out;
}

bool is_convex(const std::vector<double>& x, const std::vector<double>& y, double tol) {
  if (x.size() != y.size() || x.size() < 3) return false;
  std::size_t n = x.size();

  auto [mnx, mxx] = std::minmax_element(x.begin(), x.end());
  auto [mny, mxy] = std::minmax_element(y.begin(), y.end());
  double scale = std::max(*mxx - *mnx, *mxy - *mny);
  if (!(scale > 0.0)) return false;
  double dead = tol * scale * scale;

  std::vector<double> ex, ey;
  ex.reserve(n);
  ey.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t k1 = (k + 1) % n;
    double dx = x[k1] - x[k], dy = y[k1] - y[k];
    if (dx != 0.0 || dy != 0.0) {
      ex.push_back(dx);
      ey.push_back(dy);
    }
  }
  if (ex.size() < 3) return false;

  int sign = 0;
  double turning = 0.0;
  for (std::size_t k = 0; k < ex.size(); ++k) {
    std::size_t k1 = (k + 1) % ex.size();
    double cross = ex[k] * ey[k1] - ey[k] * ex[k1];
    double dot = ex[k] * ex[k1] + ey[k] * ey[k1];
    turning += std::atan2(cross, dot);
    if (std::abs(cross) > dead) {
      int s = cross > 0.0 ? 1 : -1;
      if (sign != 0 && s != sign) return false;
      sign = s;
    }
  }
  return std::abs(std::abs(turning) - 2.0 * std::numbers::pi) <= 1e-6;
}

bool is_convex(const Loop& loop, double tol) {
  if (loop.wraps_torus) return false;
  return is_convex(loop.x, loop.y, tol);
}

namespace {

bool encloses(const Loop& l, double px, double py) {
  bool in = false;
  for (std::size_t k = 0; k < l.x.size(); ++k) {
    std::size_t k1 = (k + 1) % l.x.size();
    if ((l.y[k] > py) == (l.y[k1] > py)) continue;
    double xc = l.x[k] + (py - l.y[k]) / (l.y[k1] - l.y[k]) * (l.x[k1] - l.x[k]);
    if (xc > px) in = !in;
  }
  return in;
}

// A level passes only when its contour is one non-wrapping loop that is
// convex as a polygon AND encloses the recentered extremum, which rules out
// complement-of-droplet regions whose boundary is itself a convex loop.
struct LevelVerdict {
  bool convex = false;
  bool multi = false;
};

LevelVerdict judge(const Field& rc, double level) {
  LevelVerdict v;
  Contour c = contour(rc, level);
  v.multi = c.loops.size() != 1;
  if (v.multi || c.loops[0].wraps_torus) return v;

  const Loop& loop = c.loops[0];
  double center = rc.grid.coord(rc.n() / 2);
  if (!encloses(loop, center, center)) return v;
  v.convex = is_convex(loop);
  return v;
}

}  // namespace

ConvexityReport convexity_scan(const Field& u, int n_levels) {
  if (n_levels < 1) throw std::invalid_argument("convexity_scan: need at least one level");
  auto [mn, mx] = std::minmax_element(u.values.begin(), u.values.end());
  double range = *mx - *mn;
  if (!(range > 0.0)) throw std::invalid_argument("convexity_scan: constant field");
  double eps = 1e-3 * range;
  double lo = *mn + eps, hi = *mx - eps;

  ConvexityReport r;
  r.levels.resize(n_levels);
  for (int k = 0; k < n_levels; ++k)
    r.levels[k] = n_levels == 1 ? 0.5 * (lo + hi) : lo + k * (hi - lo) / (n_levels - 1);
  r.superlevel_convex.assign(n_levels, 0);
  r.sublevel_convex.assign(n_levels, 0);
  r.superlevel_multi.assign(n_levels, 0);
  r.sublevel_multi.assign(n_levels, 0);

  Field cmax = recenter_at_max(u);
  Field cmin = recenter_at_min(u);
  parallel_for(n_levels, [&](int k) {
    LevelVerdict sup = judge(cmax, r.levels[k]);
    LevelVerdict sub = judge(cmin, r.levels[k]);
    r.superlevel_convex[k] = sup.convex;
    r.superlevel_multi[k] = sup.multi;
    r.sublevel_convex[k] = sub.convex;
    r.sublevel_multi[k] = sub.multi;
  });

  int fail = -1;
  for (int k = n_levels - 1; k >= 0; --k)
    if (!r.superlevel_convex[k]) {
      fail = k;
      break;
    }
  if (fail < 0) {
    r.t_star_lo = r.t_star_hi = r.levels.front();
  } else {
    r.t_star_lo = r.levels[fail];
    r.t_star_hi = fail + 1 < n_levels ? r.levels[fail + 1] : r.levels[fail];
  }
  return r;
}

std::vector<RayViolation> ray_monotonicity(const Field& u, int n_rays, double tol) {
  if (n_rays < 1) throw std::invalid_argument("ray_monotonicity: need at least one ray");
  auto [mn, mx] = std::minmax_element(u.values.begin(), u.values.end());
  if (tol < 0.0) tol = 1e-8 * (*mx - *mn);

  Field rc = recenter_at_max(u);
  int n = rc.n();
  double h = rc.grid.h();
  double side = rc.grid.side;
  double cx = rc.grid.coord(n / 2), cy = rc.grid.coord(n / 2);

  auto sample = [&](double x, double y) {
    double fi = x / h, fj = y / h;
    int i0 = static_cast<int>(std::floor(fi)), j0 = static_cast<int>(std::floor(fj));
    double wi = fi - i0, wj = fj - j0;
    int i = ((i0 % n) + n) % n, j = ((j0 % n) + n) % n;
    int i1 = (i + 1) % n, j1 = (j + 1) % n;
    return (1.0 - wi) * ((1.0 - wj) * rc.at(i, j) + wj * rc.at(i, j1)) +
           wi * ((1.0 - wj) * rc.at(i1, j) + wj * rc.at(i1, j1));
  };

  std::vector<std::vector<RayViolation>> hits(n_rays);
  parallel_for(n_rays, [&](int r) {
    double theta = 2.0 * std::numbers::pi * r / n_rays;
    double dx = std::cos(theta), dy = std::sin(theta);
    double tmax = 0.5 * side / std::max(std::abs(dx), std::abs(dy));
    double step = 0.5 * h;
    double prev = sample(cx, cy);
    for (double t = step; t <= tmax; t += step) {
      double v = sample(cx + t * dx, cy + t * dy);
      if (v > prev + tol) hits[r].push_back({r, t, v - prev});
      prev = v;
    }
  });

  std::vector<RayViolation> out;
  for (auto& v : hits) out.insert(out.end(), v.begin(), v.end());
  return out;
}

H2Report h2_scan(const Field& u, const Model& m, double c_star, int n_levels) {
  if (n_levels < 1) throw std::invalid_argument("h2_scan: need at least one level");
  double umax = *std::max_element(u.values.begin(), u.values.end());
  if (!(c_star < umax)) throw std::invalid_argument("h2_scan: c_star >= max(u)");

  H2Report r;
  r.u_max = umax;
  r.lambda_phi = lambda_phi_estimate(u, m);
  r.h2_holds = true;
  r.rows.resize(n_levels);
  double phi2 = m.phi * m.phi;
  for (int k = 0; k < n_levels; ++k) {
    double c = c_star + (k + 0.5) * (umax - c_star) / n_levels;
    double f = Gp(c) / phi2 + r.lambda_phi / m.phi;
    double fp = Gpp(c) / phi2;
    r.rows[k] = {c, f, fp};
    if (!(f > 0.0 && fp > 0.0)) r.h2_holds = false;
  }
  return r;
}

}  // namespace chcrit
