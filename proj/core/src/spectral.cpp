#include "chcrit/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "accum.hpp"

namespace chcrit {

Grid make_grid(double phi, double xi, int max_n) {
  if (!std::isfinite(phi) || !std::isfinite(xi) || phi <= 0.0 || phi > 0.5 || xi <= 0.0)
    throw std::invalid_argument("make_grid: require phi in (0, 0.5] and xi > 0");
  double half = std::ceil(std::pow(xi / phi, 1.5));
  if (!(half >= 1.0) || 2.0 * half > static_cast<double>(max_n))
    throw std::invalid_argument("make_grid: grid size exceeds the configured cap");
  Grid g;
  g.n = std::max(4, 2 * static_cast<int>(half));
  g.side = std::pow(xi, 1.5) / std::sqrt(phi);
  g.phi = phi;
  g.xi = xi;
  return g;
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("fields live on different grids");
}

namespace detail {

double ksum(const double* a, std::size_t len) {
  Kahan k;
  for (std::size_t i = 0; i < len; ++i) k.add(a[i]);
  return k.s;
}

double shifted_dist_sq_plain(const Field& u, const Field& psi, int di, int dj) {
  int n = u.grid.n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    int si = (i - di) % n;
    if (si < 0) si += n;
    for (int j = 0; j < n; ++j) {
      int sj = (j - dj) % n;
      if (sj < 0) sj += n;
      double d = u.at(i, j) - psi.at(si, sj);
      s += d * d;
    }
  }
  return s * u.grid.cell_area();
}

}  // namespace detail

namespace fft {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct Workspace {
  int n = 0;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit Workspace(int n_) : n(n_) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    real = fftw_alloc_real(static_cast<std::size_t>(n) * n);
    spec = fftw_alloc_complex(spec_size(n));
    fwd = fftw_plan_dft_r2c_2d(n, n, real, spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_2d(n, n, spec, real, FFTW_ESTIMATE);
    if (!fwd || !bwd) throw std::runtime_error("fftw plan creation failed");
  }
  Workspace(const Workspace&) = delete;
  ~Workspace() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(spec);
  }
};

Workspace& workspace_for(int n) {
  thread_local std::map<int, std::unique_ptr<Workspace>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Workspace>(n);
  return *slot;
}

}  // namespace

void forward(const Field& u, std::vector<cplx>& out) {
  int n = u.grid.n;
  Workspace& ws = workspace_for(n);
  std::memcpy(ws.real, u.values.data(), sizeof(double) * u.values.size());
  fftw_execute(ws.fwd);
  std::size_t m = spec_size(n);
  out.resize(m);
  double inv = 1.0 / (static_cast<double>(n) * n);
  for (std::size_t i = 0; i < m; ++i) out[i] = cplx(ws.spec[i][0] * inv, ws.spec[i][1] * inv);
}

void inverse(const std::vector<cplx>& in, Field& out) {
  int n = out.grid.n;
  if (n <= 0 || in.size() != spec_size(n))
    throw std::invalid_argument("inverse: spectrum size does not match the grid");
  Workspace& ws = workspace_for(n);
  for (std::size_t i = 0; i < in.size(); ++i) {
    ws.spec[i][0] = in[i].real();
    ws.spec[i][1] = in[i].imag();
  }
  fftw_execute(ws.bwd);
  out.values.resize(out.grid.size());
  std::memcpy(out.values.data(), ws.real, sizeof(double) * out.values.size());
}

double kx_full(int a, int n, double side) {
  int f = (a <= n / 2) ? a : a - n;
  return 2.0 * std::numbers::pi * f / side;
}

double ky_full(int b, int n, double side) {
  (void)n;
  return 2.0 * std::numbers::pi * b / side;
}

double kx_deriv(int a, int n, double side) {
  if (2 * a == n) return 0.0;
  return kx_full(a, n, side);
}

double ky_deriv(int b, int n, double side) {
  if (2 * b == n) return 0.0;
  return ky_full(b, n, side);
}

double parseval_weight(int b, int n) { return (b == 0 || 2 * b == n) ? 1.0 : 2.0; }

}  // namespace fft

double mean(const Field& u) {
  return detail::ksum(u.values.data(), u.values.size()) / static_cast<double>(u.grid.size());
}

double integrate(const Field& u) {
  return detail::ksum(u.values.data(), u.values.size()) * u.grid.cell_area();
}

Field project_zero_mean(const Field& u) {
  double mu = mean(u);
  Field r = u;
  for (double& v : r.values) v -= mu;
  return r;
}

double l2_norm_sq(const Field& u) {
  detail::Kahan k;
  for (double v : u.values) k.add(v * v);
  return k.s * u.grid.cell_area();
}

double l2_dist_sq(const Field& u, const Field& v) {
  require_same_grid(u, v);
  detail::Kahan k;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    double d = u.values[i] - v.values[i];
    k.add(d * d);
  }
  return k.s * u.grid.cell_area();
}

double l2_dot(const Field& u, const Field& v) {
  require_same_grid(u, v);
  detail::Kahan k;
  for (std::size_t i = 0; i < u.values.size(); ++i) k.add(u.values[i] * v.values[i]);
  return k.s * u.grid.cell_area();
}

Field spectral_laplacian(const Field& u) {
  int n = u.grid.n;
  int nc = n / 2 + 1;
  std::vector<fft::cplx> spec;
  fft::forward(u, spec);
  for (int a = 0; a < n; ++a) {
    double kx = fft::kx_full(a, n, u.grid.side);
    for (int b = 0; b < nc; ++b) {
      double ky = fft::ky_full(b, n, u.grid.side);
      spec[static_cast<std::size_t>(a) * nc + b] *= -(kx * kx + ky * ky);
    }
  }
  Field out(u.grid);
  fft::inverse(spec, out);
  return out;
}

Field grad_sq_density(const Field& u) {
  int n = u.grid.n;
  int nc = n / 2 + 1;
  std::vector<fft::cplx> spec, sx, sy;
  fft::forward(u, spec);
  sx.resize(spec.size());
  sy.resize(spec.size());
  for (int a = 0; a < n; ++a) {
    double kx = fft::kx_deriv(a, n, u.grid.side);
    for (int b = 0; b < nc; ++b) {
      double ky = fft::ky_deriv(b, n, u.grid.side);
      std::size_t idx = static_cast<std::size_t>(a) * nc + b;
      fft::cplx c = spec[idx];
      sx[idx] = fft::cplx(-kx * c.imag(), kx * c.real());
      sy[idx] = fft::cplx(-ky * c.imag(), ky * c.real());
    }
  }
  Field ux(u.grid), uy(u.grid);
  fft::inverse(sx, ux);
  fft::inverse(sy, uy);
  Field out(u.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = ux.values[i] * ux.values[i] + uy.values[i] * uy.values[i];
  return out;
}

Field cyclic_shift(const Field& u, int di, int dj) {
  int n = u.grid.n;
  Field r(u.grid);
  for (int i = 0; i < n; ++i) {
    int si = (i - di) % n;
    if (si < 0) si += n;
    for (int j = 0; j < n; ++j) {
      int sj = (j - dj) % n;
      if (sj < 0) sj += n;
      r.at(i, j) = u.at(si, sj);
    }
  }
  return r;
}

TranslatedMatch min_translated_l2_sq(const Field& u, const Field& psi) {
  require_same_grid(u, psi);
  int n = u.grid.n;
  int nc = n / 2 + 1;

  std::vector<fft::cplx> fu, fp;
  fft::forward(u, fu);
  fft::forward(psi, fp);
  for (std::size_t i = 0; i < fu.size(); ++i) fu[i] *= std::conj(fp[i]);
  Field corr(u.grid);
  fft::inverse(fu, corr);
  (void)nc;

  double cmax = corr.values[0];
  for (double v : corr.values) cmax = std::max(cmax, v);
  double tol = 1e-12 * std::max(std::abs(cmax), 1e-300);

  TranslatedMatch best;
  bool have = false;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (corr.at(i, j) < cmax - tol) continue;
      double d2 = detail::shifted_dist_sq_plain(u, psi, i, j);
      if (!have || d2 < best.dist2) {
        best = {d2, i, j};
        have = true;
      }
    }
  }
  return best;
}

}  // namespace chcrit
