#include "chcrit/nucleation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chcrit/spectral.hpp"

namespace chcrit {

namespace {

double adapt_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double eps, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double sum = left + right;
  if (depth <= 0 || std::abs(sum - whole) <= 15.0 * eps) return sum + (sum - whole) / 15.0;
  return adapt_simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adapt_simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double quad(const std::function<double(double)>& f, double a, double b, double eps) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adapt_simpson(f, a, b, fa, fm, fb, whole, eps, 40);
}

double xi_coeff(double xi, int d) { return 4.0 * std::pow(xi, -(d + 1.0)); }

// f'' is increasing from -inf to 8 xi^-(d+1); its unique root splits the two
// stationary volumes of f.
double inflection_volume(double xi, int d) {
  double p = (d - 1.0) / d;
  auto fpp = [&](double nu) {
    return cbar1(d) * p * (p - 1.0) * std::pow(nu, p - 2.0) + 2.0 * xi_coeff(xi, d);
  };
  double lo = 1e-12, hi = 1.0;
  while (fpp(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("inflection_volume: no sign change");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    (fpp(mid) <= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Bisection for f' = 0 with f'(lo) > 0 > f'(hi) or the reverse.
double bisect_fprime(double xi, int d, double lo, double hi) {
  bool lo_pos = f_xi_prime(lo, xi, d) > 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    if ((f_xi_prime(mid, xi, d) > 0.0) == lo_pos)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double interface_c0(const std::function<double(double)>& g) {
  auto f = [&](double s) { return std::sqrt(std::max(0.0, 2.0 * g(s))); };
  return quad(f, -1.0, 1.0, 1e-13);
}

double interface_c0() {
  static const double value = interface_c0([](double s) { return G(s); });
  return value;
}

double sphere_area(int d) {
  if (d < 2) throw std::invalid_argument("sphere_area: require d >= 2");
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

double cbar1(int d) {
  static const double d2 = interface_c0() * std::pow(sphere_area(2), 0.5) * std::pow(2.0, 0.5);
  if (d == 2) return d2;
  return interface_c0() * std::pow(sphere_area(d), 1.0 / d) * std::pow(d, (d - 1.0) / d);
}

double f_xi(double nu, double xi, int d) {
  if (!(nu >= 0.0)) throw std::invalid_argument("f_xi: require nu >= 0");
  return cbar1(d) * std::pow(nu, (d - 1.0) / d) - 4.0 * nu + xi_coeff(xi, d) * nu * nu;
}

double f_xi_prime(double nu, double xi, int d) {
  if (!(nu >= 0.0)) throw std::invalid_argument("f_xi_prime: require nu >= 0");
  if (nu == 0.0) return HUGE_VAL;
  return cbar1(d) * ((d - 1.0) / d) * std::pow(nu, -1.0 / d) - 4.0 + 2.0 * xi_coeff(xi, d) * nu;
}

NucleationConstants critical_volumes(double xi, int d) {
  if (!std::isfinite(xi) || xi <= 0.0) throw std::invalid_argument("critical_volumes: bad xi");
  NucleationConstants nc;
  nc.d = d;
  nc.xi = xi;
  nc.c0 = interface_c0();
  nc.cbar1 = cbar1(d);
  nc.nu_s = nc.c_s = nc.nu_m = nc.c_m = std::nan("");

  double nu_infl = inflection_volume(xi, d);
  if (!(f_xi_prime(nu_infl, xi, d) < 0.0)) {
    nc.exists_droplet = false;
    return nc;
  }

  double lo = nu_infl;
  while (!(f_xi_prime(lo, xi, d) > 0.0)) lo *= 0.5;
  nc.nu_s = bisect_fprime(xi, d, lo, nu_infl);

  double hi = nu_infl;
  while (!(f_xi_prime(hi, xi, d) > 0.0)) hi *= 2.0;
  nc.nu_m = bisect_fprime(xi, d, nu_infl, hi);

  nc.c_s = f_xi(nc.nu_s, xi, d);
  nc.c_m = f_xi(nc.nu_m, xi, d);
  nc.exists_droplet = true;
  return nc;
}

std::pair<double, double> bifurcation_xis(int d) {
  // tilde_xi: the minimum of f' over nu crosses zero.
  auto min_fprime = [&](double xi) { return f_xi_prime(inflection_volume(xi, d), xi, d); };
  double lo = 0.2, hi = 10.0;
  if (!(min_fprime(lo) > 0.0) || !(min_fprime(hi) < 0.0))
    throw std::runtime_error("bifurcation_xis: bracket failure");
  while (hi - lo > 1e-10) {
    double mid = 0.5 * (lo + hi);
    (min_fprime(mid) > 0.0 ? lo : hi) = mid;
  }
  double tilde_xi = 0.5 * (lo + hi);

  // xi_d: c_m crosses zero.
  auto cm = [&](double xi) { return critical_volumes(xi, d).c_m; };
  lo = tilde_xi * (1.0 + 1e-7);
  hi = 10.0;
  if (!(cm(lo) > 0.0) || !(cm(hi) < 0.0))
    throw std::runtime_error("bifurcation_xis: c_m bracket failure");
  while (hi - lo > 1e-10) {
    double mid = 0.5 * (lo + hi);
    (cm(mid) > 0.0 ? lo : hi) = mid;
  }
  return {tilde_xi, 0.5 * (lo + hi)};
}

Field sharp_profile_psi(double nu, const Grid& g) {
  if (!std::isfinite(nu) || nu <= 0.0) throw std::invalid_argument("sharp_profile_psi: bad nu");
  double r = std::sqrt(nu / std::numbers::pi);
  if (2.0 * r >= g.side) throw std::invalid_argument("sharp_profile_psi: disc does not fit");
  double c = 0.5 * g.side;
  double r2 = r * r;
  Field out(g);
  for (int i = 0; i < g.n; ++i) {
    double dx = g.coord(i) - c;
    for (int j = 0; j < g.n; ++j) {
      double dy = g.coord(j) - c;
      out.at(i, j) = (dx * dx + dy * dy < r2) ? 1.0 : -1.0;
    }
  }
  return out;
}

Field droplet_ansatz(double nu, const Model& m, const Grid& g) {
  if (!std::isfinite(nu) || nu <= 0.0) throw std::invalid_argument("droplet_ansatz: bad nu");
  if (g.phi != m.phi || g.xi != m.xi)
    throw std::invalid_argument("droplet_ansatz: grid does not match the model");
  double r = std::sqrt(nu / std::numbers::pi);
  double c = 0.5 * g.side;
  double w = std::sqrt(2.0) * m.phi;
  Field out(g);
  for (int i = 0; i < g.n; ++i) {
    double dx = std::abs(g.coord(i) - c);
    dx = std::min(dx, g.side - dx);
    for (int j = 0; j < g.n; ++j) {
      double dy = std::abs(g.coord(j) - c);
      dy = std::min(dy, g.side - dy);
      out.at(i, j) = std::tanh((r - std::hypot(dx, dy)) / w);
    }
  }
  double shift = (-1.0 + m.phi) - mean(out);
  for (double& v : out.values) v += shift;
  return out;
}

}  // namespace chcrit
