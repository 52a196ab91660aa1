#pragma once

#include <cstddef>
#include <vector>

namespace chcrit {

// Uniform n x n sampling of the periodic square [0, side)^2. Samples sit at
// (ih, jh), h = side/n, each the center of its own periodic cell. phi and xi
// record the regime that produced the grid.
struct Grid {
  int n = 0;
  double side = 0.0;
  double phi = 0.0;
  double xi = 0.0;

  double h() const { return side / n; }
  double cell_area() const { return h() * h(); }
  std::size_t size() const { return static_cast<std::size_t>(n) * n; }
  double coord(int i) const { return i * h(); }
  bool operator==(const Grid&) const = default;
};

// side = xi^(3/2) phi^(-1/2), n = 2 ceil((xi/phi)^(3/2)). Throws on
// non-finite or out-of-range phi/xi and when n would exceed max_n.
Grid make_grid(double phi, double xi, int max_n = 4096);

// Real scalar samples on a Grid, row-major: values[i*n + j].
struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  int n() const { return grid.n; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.n + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.n + j]; }
};

// Throws std::invalid_argument unless both fields share one grid.
void require_same_grid(const Field& a, const Field& b);

}  // namespace chcrit
