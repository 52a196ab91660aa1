#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "chcrit/grid.hpp"

namespace testutil {

inline constexpr double pi = std::numbers::pi;

// cos(2 pi (p x + q y) / side + phase), an exact grid eigenfunction of the
// spectral Laplacian for |p|, |q| < n/2.
inline chcrit::Field mode_field(const chcrit::Grid& g, int p, int q, double amp = 1.0,
                                double phase = 0.0) {
  chcrit::Field u(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      u.at(i, j) = amp * std::cos(2.0 * pi * (p * g.coord(i) + q * g.coord(j)) / g.side + phase);
  return u;
}

// Random band-limited field: modes with |p|, |q| <= kmax, zero mean.
inline chcrit::Field random_band_limited(const chcrit::Grid& g, int kmax, std::mt19937& rng,
                                         double amp = 1.0) {
  std::uniform_real_distribution<double> coef(-amp, amp), ph(0.0, 2.0 * pi);
  chcrit::Field u(g);
  for (int p = 0; p <= kmax; ++p)
    for (int q = -kmax; q <= kmax; ++q) {
      if (p == 0 && q <= 0) continue;
      double a = coef(rng), s = ph(rng);
      for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
          u.at(i, j) += a * std::cos(2.0 * pi * (p * g.coord(i) + q * g.coord(j)) / g.side + s);
    }
  return u;
}

inline chcrit::Field random_field(const chcrit::Grid& g, std::mt19937& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> dist(-amp, amp);
  chcrit::Field u(g);
  for (double& v : u.values) v = dist(rng);
  return u;
}

// Smooth periodic bump exp(-r^2 / w^2) centered at (cx, cy) in torus metric.
inline chcrit::Field bump_field(const chcrit::Grid& g, double cx, double cy, double w,
                                double amp = 1.0) {
  chcrit::Field u(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      double dx = std::remainder(g.coord(i) - cx, g.side);
      double dy = std::remainder(g.coord(j) - cy, g.side);
      u.at(i, j) = amp * std::exp(-(dx * dx + dy * dy) / (w * w));
    }
  return u;
}

struct Pt {
  double x, y;
};

// Convex hull (Andrew monotone chain), counterclockwise, no duplicate
// endpoint. Collinear points dropped.
inline std::vector<Pt> convex_hull(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Pt& a, const Pt& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  auto cross = [](const Pt& o, const Pt& a, const Pt& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<Pt> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

inline double polygon_area(const std::vector<double>& x, const std::vector<double>& y) {
  double a = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::size_t k1 = (k + 1) % x.size();
    a += x[k] * y[k1] - x[k1] * y[k];
  }
  return 0.5 * std::abs(a);
}

inline double polygon_perimeter(const std::vector<double>& x, const std::vector<double>& y) {
  double p = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::size_t k1 = (k + 1) % x.size();
    p += std::hypot(x[k1] - x[k], y[k1] - y[k]);
  }
  return p;
}

}  // namespace testutil
