#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chcrit/diagnostics.hpp"
#include "chcrit/energy.hpp"
#include "chcrit/spectral.hpp"

using namespace chcrit;

TEST_CASE("kind names") {
  CHECK(kind_name(Kind::minimizer) == "minimizer");
  CHECK(kind_name(Kind::saddle) == "saddle");
}

TEST_CASE("interfacial band is empty for phi above 1/8") {
  // The band [-1+2 phi^(1/3), 1-2 phi^(1/3)] collapses once 2 phi^(1/3) > 1.
  for (double phi : {0.4, 0.2}) {
    Model m = make_model(phi, 2.3);
    Grid g = make_grid(phi, 2.3);
    Field u(g);
    for (std::size_t k = 0; k < u.values.size(); ++k)
      u.values[k] = -1.0 + 2.0 * (k % 100) / 99.0;
    CHECK(interfacial_measure(u, m) == 0.0);
  }
}

TEST_CASE("interfacial measure counts exactly the in-band samples") {
  Model m = make_model(0.1, 2.3);
  Grid g = make_grid(0.1, 2.3);
  double edge = 2.0 * std::cbrt(0.1);
  double lo = -1.0 + edge, hi = 1.0 - edge;
  REQUIRE(lo < hi);

  Field u(g, -1.0);
  u.values[0] = lo;
  u.values[1] = hi;
  u.values[2] = 0.5 * (lo + hi);
  u.values[3] = lo - 1e-9;
  u.values[4] = hi + 1e-9;
  CHECK(interfacial_measure(u, m) == doctest::Approx(3.0 * g.cell_area()).epsilon(1e-14));
}

TEST_CASE("observables of the uniform state against closed forms") {
  double phi = 0.2, xi = 2.3;
  Model m = make_model(phi, xi);
  Grid g = make_grid(phi, xi);
  NucleationConstants nc = critical_volumes(xi, 2);
  Field u(g, -1.0 + phi);

  ObservablesRow row = observables_row(u, Kind::minimizer, m, nc);
  CHECK(row.phi == phi);
  CHECK(row.kind == Kind::minimizer);
  CHECK(row.interfacial == 0.0);
  CHECK(row.energy_gap == doctest::Approx(std::abs(nc.c_m)).epsilon(1e-10));
  CHECK(row.nu_gap == doctest::Approx(nc.nu_m).epsilon(1e-12));
  CHECK(row.error <= 1e-20);

  // |uniform - psi|^2 is shift invariant: (2-phi)^2 on the +1 disc and phi^2
  // outside, with the disc cell count defining its measure.
  Field psi = sharp_profile_psi(nc.nu_m, g);
  std::size_t plus = 0;
  for (double v : psi.values) plus += v > 0.0;
  double a_in = static_cast<double>(plus) * g.cell_area();
  double a_out = g.side * g.side - a_in;
  double expect = (2.0 - phi) * (2.0 - phi) * a_in + phi * phi * a_out;
  CHECK(row.l2_gap == doctest::Approx(expect).epsilon(1e-12));

  ObservablesRow srow = observables_row(u, Kind::saddle, m, nc);
  CHECK(srow.energy_gap == doctest::Approx(std::abs(nc.c_s)).epsilon(1e-10));
  CHECK(srow.nu_gap == doctest::Approx(nc.nu_s).epsilon(1e-12));
}

TEST_CASE("observables_row requires a droplet branch") {
  double xi = 1.2;  // below the fold
  Model m = make_model(0.2, xi);
  Grid g = make_grid(0.2, xi);
  NucleationConstants nc = critical_volumes(xi, 2);
  REQUIRE_FALSE(nc.exists_droplet);
  Field u(g, -0.8);
  CHECK_THROWS_AS(observables_row(u, Kind::minimizer, m, nc), std::invalid_argument);
}

TEST_CASE("rate_table emits exact dyadic rates") {
  ObservablesRow coarse, mid, fine;
  coarse.phi = 0.4;
  mid.phi = 0.2;
  fine.phi = 0.1;
  for (ObservablesRow* r : {&coarse, &mid, &fine}) r->kind = Kind::minimizer;

  coarse.interfacial = 8.0;
  mid.interfacial = 4.0;
  fine.interfacial = 2.0;  // rate 1
  coarse.energy_gap = 4.0;
  mid.energy_gap = 1.0;
  fine.energy_gap = 0.25;  // rate 2
  coarse.nu_gap = 3.0;
  mid.nu_gap = 3.0;
  fine.nu_gap = 3.0;  // rate 0
  coarse.l2_gap = 1.0;
  mid.l2_gap = 2.0;
  fine.l2_gap = 4.0;  // rate -1
  coarse.error = 0.0;
  mid.error = 1.0;
  fine.error = 0.0;  // blanks

  auto rows = rate_table({coarse, mid, fine});
  REQUIRE(rows.size() == 10);
  auto find = [&](double phi, const std::string& obs) {
    for (auto& r : rows)
      if (r.phi == phi && r.obs == obs) return r.log2_ratio;
    FAIL("missing rate row");
    return 0.0;
  };
  CHECK(find(0.2, "interfacial") == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(find(0.1, "interfacial") == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(find(0.2, "energy_gap") == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(find(0.1, "energy_gap") == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(find(0.2, "nu_gap") == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(find(0.2, "l2_gap") == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::isnan(find(0.2, "error")));
  CHECK(std::isnan(find(0.1, "error")));
}

TEST_CASE("rate_table rejects malformed ladders") {
  ObservablesRow a, b;
  a.phi = 0.4;
  b.phi = 0.2;
  a.kind = b.kind = Kind::minimizer;
  CHECK_THROWS_AS(rate_table({a}), std::invalid_argument);

  ObservablesRow c = b;
  c.phi = 0.15;
  CHECK_THROWS_AS(rate_table({a, c}), std::invalid_argument);

  ObservablesRow d = b;
  d.kind = Kind::saddle;
  CHECK_THROWS_AS(rate_table({a, d}), std::invalid_argument);
}
