#include "chcrit/string_method.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "chcrit/errors.hpp"
#include "chcrit/parallel.hpp"
#include "chcrit/spectral.hpp"

namespace chcrit {

namespace {

void check_state(const StringState& s) {
  if (s.images.size() < 2) throw std::invalid_argument("string: need at least two images");
  if (s.alpha.size() != s.images.size())
    throw std::invalid_argument("string: alpha/image count mismatch");
  for (std::size_t i = 1; i < s.images.size(); ++i)
    require_same_grid(s.images[0], s.images[i]);
}

double effective_dt(const StringConfig& cfg, const Model& m) {
  double dt = cfg.dt > 0.0 ? cfg.dt : default_dt(m);
  if (!std::isfinite(dt) || dt <= 0.0) throw std::invalid_argument("string: bad dt");
  return dt;
}

std::vector<double> segment_lengths(const std::vector<Field>& images) {
  std::vector<double> dd(images.size() - 1);
  for (std::size_t i = 0; i + 1 < images.size(); ++i)
    dd[i] = std::sqrt(l2_dist_sq(images[i + 1], images[i]));
  return dd;
}

int interior_argmax(const std::vector<double>& e) {
  int best = 1;
  for (int i = 2; i + 1 < static_cast<int>(e.size()); ++i)
    if (e[i] > e[best]) best = i;
  return best;
}

}  // namespace

int default_image_count(const Grid& g) { return g.n <= 256 ? 512 : 256; }

StringState init_linear(const Field& a, const Field& b, int M) {
  require_same_grid(a, b);
  if (M < 1) throw std::invalid_argument("init_linear: need at least one interval");
  StringState s;
  s.images.reserve(M + 1);
  s.alpha.resize(M + 1);
  for (int i = 0; i <= M; ++i) {
    double t = static_cast<double>(i) / M;
    s.alpha[i] = t;
    Field u(a.grid);
    for (std::size_t k = 0; k < u.values.size(); ++k)
      u.values[k] = (1.0 - t) * a.values[k] + t * b.values[k];
    s.images.push_back(std::move(u));
  }
  return s;
}

void evolve_images(StringState& s, const StringConfig& cfg, const Model& m) {
  check_state(s);
  if (cfg.substeps_per_reparam < 1)
    throw std::invalid_argument("string: substeps_per_reparam must be positive");
  double dt = effective_dt(cfg, m);
  int count = static_cast<int>(s.images.size());
  std::vector<double> disp(count, 0.0);
  parallel_for(count, [&](int i) {
    if (cfg.pin_endpoints && (i == 0 || i == count - 1)) return;
    Field cur = s.images[i];
    try {
      for (int k = 0; k < cfg.substeps_per_reparam; ++k) cur = descent_step(cur, dt, m);
    } catch (const BlowUpError& e) {
      throw BlowUpError(e.what(), i);
    }
    disp[i] = std::sqrt(l2_dist_sq(cur, s.images[i]));
    s.images[i] = std::move(cur);
  });
  s.last_displacement = *std::max_element(disp.begin(), disp.end());
}

void reparameterize(StringState& s) {
  check_state(s);
  int M = static_cast<int>(s.images.size()) - 1;
  if (M < 2) return;
  for (int pass = 0; pass < 200; ++pass) {
    std::vector<double> dd = segment_lengths(s.images);
    double total = 0.0;
    for (double d : dd) total += d;
    if (total == 0.0) return;
    double target = total / M;
    double dev = 0.0;
    for (double d : dd) dev = std::max(dev, std::abs(d - target));
    if (dev <= 1e-10 * target) return;

    std::vector<double> arc(M + 1, 0.0);
    for (int i = 0; i < M; ++i) arc[i + 1] = arc[i] + dd[i];

    std::vector<Field> fresh(s.images.size());
    fresh[0] = s.images[0];
    fresh[M] = s.images[M];
    parallel_for(M - 1, [&](int j0) {
      int j = j0 + 1;
      double t = total * j / M;
      int idx = static_cast<int>(std::upper_bound(arc.begin(), arc.end(), t) - arc.begin()) - 1;
      idx = std::clamp(idx, 0, M - 1);
      double seg = arc[idx + 1] - arc[idx];
      double lam = seg > 0.0 ? (t - arc[idx]) / seg : 0.0;
      Field u(s.images[0].grid);
      const auto& a = s.images[idx].values;
      const auto& b = s.images[idx + 1].values;
      for (std::size_t k = 0; k < u.values.size(); ++k)
        u.values[k] = a[k] + lam * (b[k] - a[k]);
      fresh[j] = std::move(u);
    });
    s.images = std::move(fresh);
  }
}

std::vector<double> image_energies(const StringState& s, const Model& m) {
  std::vector<double> e(s.images.size(), 0.0);
  parallel_for(static_cast<int>(s.images.size()), [&](int i) { e[i] = energy(s.images[i], m); });
  return e;
}

ConvergenceReport run_string(StringState& s, const StringConfig& cfg, const Model& m,
                             const std::function<void(const StringState&)>& on_barrier,
                             int barrier_every) {
  check_state(s);
  double dt = effective_dt(cfg, m);
  int substeps = std::max(1, cfg.substeps_per_reparam);
  double disp_tol = cfg.tol_displacement * dt * substeps;
  double grad_tol2 = cfg.tol_grad * cfg.tol_grad;
  int count = static_cast<int>(s.images.size());
  int M = count - 1;

  bool disp_ok = s.last_displacement < disp_tol;
  bool grad_ok = false;
  bool converged = false;

  while (s.iter < cfg.max_outer_iters) {
    std::vector<Field> before = s.images;
    evolve_images(s, cfg, m);
    reparameterize(s);
    double disp = 0.0;
    for (int i = 0; i < count; ++i)
      disp = std::max(disp, std::sqrt(l2_dist_sq(s.images[i], before[i])));
    s.last_displacement = disp;
    ++s.iter;

    disp_ok = disp < disp_tol;
    if (disp_ok) {
      if (M >= 2) {
        std::vector<double> e = image_energies(s, m);
        int isad = interior_argmax(e);
        double g2 = l2_norm_sq(grad_l2(s.images[isad], m));
        s.saddle_index = isad;
        s.grad2_at_saddle = g2;
        grad_ok = g2 <= grad_tol2;
      } else {
        grad_ok = true;
      }
    }
    if (on_barrier && barrier_every > 0 && s.iter % barrier_every == 0) on_barrier(s);
    if (disp_ok && grad_ok) {
      converged = true;
      break;
    }
  }

  ConvergenceReport r;
  r.converged = converged;
  r.displacement_converged = disp_ok;
  r.iters = s.iter;
  r.last_displacement = s.last_displacement;
  r.alpha = s.alpha;
  r.energies = image_energies(s, m);
  r.grad2.assign(count, 0.0);
  parallel_for(count, [&](int i) { r.grad2[i] = l2_norm_sq(grad_l2(s.images[i], m)); });
  if (M >= 2) {
    r.saddle_index = interior_argmax(r.energies);
    r.grad2_at_saddle = r.grad2[r.saddle_index];
    s.saddle_index = r.saddle_index;
    s.grad2_at_saddle = r.grad2_at_saddle;
  }
  return r;
}

SaddleExtract extract_saddle(const StringState& s, const Model& m) {
  check_state(s);
  int M = static_cast<int>(s.images.size()) - 1;
  if (M < 2) throw NoSaddleError("string has no interior image");
  std::vector<double> e = image_energies(s, m);
  int isad = interior_argmax(e);
  if (!(e[isad] > e[0]) || !(e[isad] > e[M]))
    throw NoSaddleError("no interior energy maximum above both endpoints");

  auto [emin, emax] = std::minmax_element(e.begin(), e.end());
  double thr = 1e-9 * (*emax - *emin);
  int changes = 0, last = 0;
  for (int i = 0; i < M; ++i) {
    double d = e[i + 1] - e[i];
    if (std::abs(d) <= thr) continue;
    int sgn = d > 0.0 ? 1 : -1;
    if (last != 0 && sgn != last) ++changes;
    last = sgn;
  }

  std::vector<double> dd = segment_lengths(s.images);
  std::vector<double> arc(M + 1, 0.0);
  for (int i = 0; i < M; ++i) arc[i + 1] = arc[i] + dd[i];
  double s0 = arc[isad - 1], s1 = arc[isad], s2 = arc[isad + 1];
  double e0 = e[isad - 1], e1 = e[isad], e2 = e[isad + 1];

  double sv = s1;
  if (s1 > s0 && s2 > s1) {
    double d1 = (e1 - e0) / (s1 - s0);
    double d2 = (e2 - e1) / (s2 - s1);
    double a2 = (d2 - d1) / (s2 - s0);
    if (a2 != 0.0) sv = std::clamp(0.5 * (s0 + s1) - d1 / (2.0 * a2), s0, s2);
  }

  SaddleExtract out;
  out.index = isad;
  out.unimodal = changes <= 1;
  out.refined_s = sv;
  out.grad2_at_index = l2_norm_sq(grad_l2(s.images[isad], m));

  int lo = sv <= s1 ? isad - 1 : isad;
  double seg = arc[lo + 1] - arc[lo];
  double lam = seg > 0.0 ? (sv - arc[lo]) / seg : 0.0;
  Field u(s.images[0].grid);
  const auto& a = s.images[lo].values;
  const auto& b = s.images[lo + 1].values;
  for (std::size_t k = 0; k < u.values.size(); ++k) u.values[k] = a[k] + lam * (b[k] - a[k]);
  out.u = std::move(u);
  return out;
}

}  // namespace chcrit
