#include "chcrit/energy.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "accum.hpp"
#include "chcrit/errors.hpp"
#include "chcrit/spectral.hpp"

namespace chcrit {

double G(double u) {
  double w = 1.0 - u * u;
  return 0.25 * w * w;
}

double Gp(double u) { return u * u * u - u; }

double Gpp(double u) { return 3.0 * u * u - 1.0; }

Model make_model(double phi, double xi) {
  if (!std::isfinite(phi) || !std::isfinite(xi) || phi <= 0.0 || phi >= 1.0 || xi <= 0.0)
    throw std::invalid_argument("make_model: require phi in (0,1) and xi > 0");
  Model m;
  m.phi = phi;
  m.xi = xi;
  m.chi_lo = 1.0 - 2.0 * std::cbrt(phi);
  m.chi_hi = 1.0 - std::cbrt(phi);
  return m;
}

double chi(double s, const Model& m) {
  double w = m.chi_window * (m.chi_hi - m.chi_lo);
  double t = (s - m.chi_lo) / w;
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return ((6.0 * t - 15.0) * t + 10.0) * t * t * t;
}

double chi_p(double s, const Model& m) {
  double w = m.chi_window * (m.chi_hi - m.chi_lo);
  double t = (s - m.chi_lo) / w;
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 30.0 * t * t * (t - 1.0) * (t - 1.0) / w;
}

namespace {

void check_model(const Field& u, const Model& m) {
  if (u.grid.phi != m.phi || u.grid.xi != m.xi)
    throw std::invalid_argument("field grid does not match the model parameters");
}

// (phi/2) integral of |grad u|^2 from the normalized spectrum, full |k|^2.
double grad_term(const std::vector<fft::cplx>& spec, const Grid& g, double phi) {
  int n = g.n, nc = n / 2 + 1;
  detail::Kahan k;
  for (int a = 0; a < n; ++a) {
    double kx = fft::kx_full(a, n, g.side);
    for (int b = 0; b < nc; ++b) {
      double ky = fft::ky_full(b, n, g.side);
      const fft::cplx& c = spec[static_cast<std::size_t>(a) * nc + b];
      k.add(fft::parseval_weight(b, n) * (kx * kx + ky * ky) *
            (c.real() * c.real() + c.imag() * c.imag()));
    }
  }
  return 0.5 * phi * g.side * g.side * k.s;
}

double energy_from(const Field& u, const std::vector<fft::cplx>& spec, const Model& m) {
  double g0 = G(-1.0 + m.phi);
  detail::Kahan k;
  for (double v : u.values) k.add(G(v) - g0);
  return grad_term(spec, u.grid, m.phi) + k.s * u.grid.cell_area() / m.phi;
}

// -phi lap(u) from the spectrum.
void neg_phi_laplacian(const std::vector<fft::cplx>& spec, const Grid& g, double phi, Field& out) {
  int n = g.n, nc = n / 2 + 1;
  std::vector<fft::cplx> s(spec.size());
  for (int a = 0; a < n; ++a) {
    double kx = fft::kx_full(a, n, g.side);
    for (int b = 0; b < nc; ++b) {
      double ky = fft::ky_full(b, n, g.side);
      std::size_t idx = static_cast<std::size_t>(a) * nc + b;
      s[idx] = spec[idx] * (phi * (kx * kx + ky * ky));
    }
  }
  fft::inverse(s, out);
}

}  // namespace

double energy(const Field& u, const Model& m) {
  check_model(u, m);
  std::vector<fft::cplx> spec;
  fft::forward(u, spec);
  return energy_from(u, spec, m);
}

double nu_volume(const Field& u, const Model& m) {
  check_model(u, m);
  detail::Kahan k;
  for (double v : u.values) k.add(chi(v, m));
  return k.s * u.grid.cell_area();
}

Field grad_l2(const Field& u, const Model& m) {
  check_model(u, m);
  std::vector<fft::cplx> spec;
  fft::forward(u, spec);
  Field g(u.grid);
  neg_phi_laplacian(spec, u.grid, m.phi, g);
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] += Gp(u.values[i]) / m.phi;
  return project_zero_mean(g);
}

double lambda_phi_estimate(const Field& u, const Model& m) {
  check_model(u, m);
  Field lap = spectral_laplacian(u);
  detail::Kahan k;
  for (std::size_t i = 0; i < u.values.size(); ++i)
    k.add(m.phi * lap.values[i] - Gp(u.values[i]) / m.phi);
  return k.s / static_cast<double>(u.grid.size());
}

EnergyReport energy_report(const Field& u, const Model& m) {
  check_model(u, m);
  std::vector<fft::cplx> spec;
  fft::forward(u, spec);

  EnergyReport r;
  r.energy = energy_from(u, spec, m);
  r.mean_value = mean(u);

  Field raw(u.grid);
  neg_phi_laplacian(spec, u.grid, m.phi, raw);
  for (std::size_t i = 0; i < raw.values.size(); ++i) raw.values[i] += Gp(u.values[i]) / m.phi;

  double mu = mean(raw);
  r.lambda_phi = -mu;
  detail::Kahan g2;
  for (double v : raw.values) {
    double d = v - mu;
    g2.add(d * d);
  }
  r.grad_norm2 = g2.s * u.grid.cell_area();
  return r;
}

Field descent_step(const Field& u, double dt, const Model& m, double* used_dt,
                   double* energy_out) {
  check_model(u, m);
  if (!std::isfinite(dt) || dt <= 0.0)
    throw std::invalid_argument("descent_step: dt must be positive");

  int n = u.grid.n, nc = n / 2 + 1;
  std::vector<fft::cplx> su, sn;
  fft::forward(u, su);
  double e0 = energy_from(u, su, m);
  if (!std::isfinite(e0)) throw BlowUpError("descent_step: non-finite input state");

  Field nl(u.grid);
  for (std::size_t i = 0; i < nl.values.size(); ++i) nl.values[i] = Gp(u.values[i]) / m.phi;
  fft::forward(nl, sn);
  sn[0] = fft::cplx(0.0, 0.0);

  double accept = 1e-12 * std::abs(e0) + 1e-13;
  double trial = dt;
  std::vector<fft::cplx> sp(su.size());
  Field out(u.grid);
  for (int attempt = 0; attempt < 60; ++attempt, trial *= 0.5) {
    for (int a = 0; a < n; ++a) {
      double kx = fft::kx_full(a, n, u.grid.side);
      for (int b = 0; b < nc; ++b) {
        double ky = fft::ky_full(b, n, u.grid.side);
        std::size_t idx = static_cast<std::size_t>(a) * nc + b;
        sp[idx] = (su[idx] - trial * sn[idx]) / (1.0 + trial * m.phi * (kx * kx + ky * ky));
      }
    }
    sp[0] = su[0];
    fft::inverse(sp, out);

    bool finite = true;
    for (double v : out.values) {
      if (!std::isfinite(v)) {
        finite = false;
        break;
      }
    }
    if (!finite) continue;

    double e1 = energy_from(out, sp, m);
    if (std::isfinite(e1) && e1 <= e0 + accept) {
      if (used_dt) *used_dt = trial;
      if (energy_out) *energy_out = e1;
      return out;
    }
  }
  throw BlowUpError("descent_step: no admissible step size restores energy decrease");
}

}  // namespace chcrit
