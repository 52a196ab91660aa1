#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "chcrit/spectral.hpp"
#include "helpers.hpp"

using namespace chcrit;
using testutil::pi;

TEST_CASE("make_grid reproduces the prescribed resolutions") {
  struct {
    double phi;
    int n;
  } cases[] = {{0.4, 28}, {0.2, 78}, {0.1, 222}, {0.05, 624}};
  for (auto [phi, n] : cases) {
    Grid g = make_grid(phi, 2.3);
    CHECK(g.n == n);
    CHECK(g.side == doctest::Approx(std::pow(2.3, 1.5) / std::sqrt(phi)).epsilon(1e-15));
  }
  CHECK(make_grid(0.1, 2.3).side == doctest::Approx(11.030412503619253).epsilon(1e-15));
}

TEST_CASE("make_grid rejects out-of-range parameters") {
  CHECK_THROWS_AS(make_grid(0.0, 2.3), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.6, 2.3), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(-0.1, 2.3), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.1, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(std::nan(""), 2.3), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.1, std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.05, 2.3, 600), std::invalid_argument);
}

TEST_CASE("mean and integrate on constants") {
  Grid g = make_grid(0.4, 2.3);
  Field u(g, -0.25);
  CHECK(mean(u) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(integrate(u) == doctest::Approx(-0.25 * g.side * g.side).epsilon(1e-14));
}

TEST_CASE("project_zero_mean removes the mean and is idempotent") {
  Grid g = make_grid(0.4, 2.3);
  std::mt19937 rng(7);
  Field u = testutil::random_field(g, rng);
  Field p = project_zero_mean(u);
  CHECK(std::abs(mean(p)) <= 1e-14);
  Field pp = project_zero_mean(p);
  for (std::size_t k = 0; k < p.values.size(); ++k)
    CHECK(pp.values[k] == doctest::Approx(p.values[k]).epsilon(1e-14));
}

TEST_CASE("fft round trip is the identity") {
  Grid g = make_grid(0.2, 2.3);
  std::mt19937 rng(11);
  Field u = testutil::random_field(g, rng);
  std::vector<fft::cplx> spec;
  fft::forward(u, spec);
  Field back(g);
  fft::inverse(spec, back);
  for (std::size_t k = 0; k < u.values.size(); ++k)
    CHECK(back.values[k] == doctest::Approx(u.values[k]).epsilon(1e-13));
}

TEST_CASE("spectral laplacian is exact on resolvable modes") {
  Grid g = make_grid(0.4, 2.3);
  for (auto [p, q] : {std::pair{1, 0}, {0, 1}, {3, 2}, {7, 5}, {13, 11}}) {
    Field u = testutil::mode_field(g, p, q, 0.8, 0.3);
    double k2 = std::pow(2.0 * pi / g.side, 2) * (p * p + q * q);
    Field lap = spectral_laplacian(u);
    double scale = 0.8 * k2;
    for (std::size_t k = 0; k < u.values.size(); ++k)
      CHECK(std::abs(lap.values[k] + k2 * u.values[k]) <= 1e-10 * scale);
  }
}

TEST_CASE("spectral laplacian of a constant vanishes") {
  Grid g = make_grid(0.4, 2.3);
  Field u(g, 0.37);
  Field lap = spectral_laplacian(u);
  for (double v : lap.values) CHECK(std::abs(v) <= 1e-14);
}

TEST_CASE("grad_sq_density matches the analytic gradient of a single mode") {
  Grid g = make_grid(0.2, 2.3);
  double a = 0.6, kx = 2.0 * pi * 3 / g.side, ky = 2.0 * pi * 2 / g.side;
  Field u = testutil::mode_field(g, 3, 2, a, 0.9);
  Field d = grad_sq_density(u);
  double k2 = kx * kx + ky * ky;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      double s = a * std::sin(kx * g.coord(i) + ky * g.coord(j) + 0.9);
      CHECK(std::abs(d.at(i, j) - k2 * s * s) <= 1e-10 * a * a * k2);
    }
}

TEST_CASE("parseval identity on band-limited fields") {
  Grid g = make_grid(0.4, 2.3);
  std::mt19937 rng(23);
  Field u = testutil::random_band_limited(g, 5, rng, 0.3);
  std::vector<fft::cplx> spec;
  fft::forward(u, spec);
  double sum = 0.0;
  int n = g.n, nc = n / 2 + 1;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < nc; ++b)
      sum += fft::parseval_weight(b, n) * std::norm(spec[a * nc + b]);
  CHECK(l2_norm_sq(u) == doctest::Approx(sum * g.side * g.side).epsilon(1e-12));
}

TEST_CASE("l2 distance and dot are consistent") {
  Grid g = make_grid(0.4, 2.3);
  std::mt19937 rng(5);
  Field u = testutil::random_field(g, rng), v = testutil::random_field(g, rng);
  double lhs = l2_dist_sq(u, v);
  double rhs = l2_norm_sq(u) - 2.0 * l2_dot(u, v) + l2_norm_sq(v);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("cyclic_shift composes and round-trips") {
  Grid g = make_grid(0.4, 2.3);
  std::mt19937 rng(3);
  Field u = testutil::random_field(g, rng);
  Field s = cyclic_shift(u, 5, -3);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      CHECK(s.at(i, j) == u.at(((i - 5) % g.n + g.n) % g.n, ((j + 3) % g.n + g.n) % g.n));
  Field back = cyclic_shift(s, -5, 3);
  for (std::size_t k = 0; k < u.values.size(); ++k) CHECK(back.values[k] == u.values[k]);
}

TEST_CASE("min_translated_l2_sq equals the exhaustive search exactly") {
  Grid g;
  g.n = 16;
  g.side = 2.0;
  g.phi = 0.25;
  g.xi = 1.0;
  std::mt19937 rng(41);
  for (int rep = 0; rep < 5; ++rep) {
    Field u = testutil::random_field(g, rng);
    Field psi = testutil::random_field(g, rng);
    TranslatedMatch m = min_translated_l2_sq(u, psi);

    double best = std::numeric_limits<double>::infinity();
    int bi = 0, bj = 0;
    double h2 = g.cell_area();
    for (int di = 0; di < g.n; ++di)
      for (int dj = 0; dj < g.n; ++dj) {
        double acc = 0.0;
        for (int i = 0; i < g.n; ++i)
          for (int j = 0; j < g.n; ++j) {
            double d = u.at(i, j) - psi.at(((i - di) % g.n + g.n) % g.n,
                                          ((j - dj) % g.n + g.n) % g.n);
            acc += d * d;
          }
        acc *= h2;
        if (acc < best) best = acc, bi = di, bj = dj;
      }
    CHECK(m.dist2 == best);
    CHECK(m.di == bi);
    CHECK(m.dj == bj);
  }
}

TEST_CASE("min_translated_l2_sq recovers a known shift of the same field") {
  Grid g = make_grid(0.4, 2.3);
  std::mt19937 rng(9);
  Field u = testutil::random_field(g, rng);
  Field psi = cyclic_shift(u, -4, 6);
  TranslatedMatch m = min_translated_l2_sq(u, psi);
  CHECK(m.dist2 <= 1e-20);
  CHECK((m.di - 4) % g.n == 0);
  CHECK((m.dj + 6) % g.n == 0);
}

TEST_CASE("require_same_grid rejects mismatched grids") {
  Field a(make_grid(0.4, 2.3)), b(make_grid(0.2, 2.3));
  CHECK_THROWS_AS(require_same_grid(a, b), std::invalid_argument);
}
