#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "chcrit/energy.hpp"

namespace chcrit {

struct StringConfig {
  int m_images = 0;             // intervals M; 0 selects the grid default
  double dt = 0.0;              // 0 selects default_dt(m)
  int max_outer_iters = 2000;
  double tol_displacement = 5e-3;
  double tol_grad = 1e-3;
  int substeps_per_reparam = 1;
  bool pin_endpoints = false;
};

// 512 images for n <= 256, else 256.
int default_image_count(const Grid& g);

struct StringState {
  std::vector<Field> images;   // M+1 fields on one grid
  std::vector<double> alpha;   // M+1 values, 0 = alpha_0 < ... < alpha_M = 1
  long long iter = 0;
  double last_displacement = 0.0;
  std::optional<int> saddle_index;
  std::optional<double> grad2_at_saddle;
};

struct ConvergenceReport {
  bool converged = false;                // displacement and gradient criteria
  bool displacement_converged = false;
  long long iters = 0;
  double last_displacement = 0.0;
  std::vector<double> alpha;
  std::vector<double> energies;          // profile along alpha
  std::vector<double> grad2;             // per-image squared gradient norm
  int saddle_index = -1;
  double grad2_at_saddle = 0.0;
};

struct SaddleExtract {
  Field u;                   // refined saddle field
  int index = -1;            // interior energy argmax
  double grad2_at_index = 0.0;  // telemetry at the raw argmax image
  bool unimodal = true;
  double refined_s = 0.0;    // arclength of the parabola vertex
};

// images_i = (1-i/M) a + (i/M) b, uniform alpha.
StringState init_linear(const Field& a, const Field& b, int M);

// Advances every image by substeps_per_reparam descent steps (endpoints too
// unless pinned) and records the max L2 displacement. Blow-ups rethrow with
// the smallest offending image index.
void evolve_images(StringState& s, const StringConfig& cfg, const Model& m);

// Redistributes images to equal consecutive L2 distances along the polyline
// by iterated linear interpolation; endpoints unchanged. Consecutive
// distances end equal within 1e-10 relative.
void reparameterize(StringState& s);

std::vector<double> image_energies(const StringState& s, const Model& m);

// Alternates evolve_images / reparameterize until the displacement per outer
// iteration drops below tol_displacement*dt*substeps and the squared gradient
// at the interior energy argmax is at most tol_grad^2, or until
// max_outer_iters total iterations. on_barrier, when set, fires after every
// barrier_every-th reparameterization.
ConvergenceReport run_string(StringState& s, const StringConfig& cfg, const Model& m,
                             const std::function<void(const StringState&)>& on_barrier = {},
                             int barrier_every = 0);

// Interior energy argmax, refined by a parabola through (arclength, energy)
// at the argmax and its neighbours; the returned field is the linear
// interpolant at the vertex. Throws NoSaddleError when an endpoint energy
// reaches the interior maximum. unimodal=false warns of extra interior
// extrema; the extraction still returns the global interior argmax.
SaddleExtract extract_saddle(const StringState& s, const Model& m);

}  // namespace chcrit
