#pragma once

#include <complex>
#include <vector>

#include "chcrit/grid.hpp"

namespace chcrit {

double mean(const Field& u);
double integrate(const Field& u);  // h^2 * sum of samples
Field project_zero_mean(const Field& u);

double l2_norm_sq(const Field& u);                   // integral of u^2
double l2_dist_sq(const Field& u, const Field& v);   // integral of (u-v)^2
double l2_dot(const Field& u, const Field& v);       // integral of u*v

// Exact on trigonometric polynomials resolvable on the grid; zero mean.
Field spectral_laplacian(const Field& u);

// Pointwise |grad u|^2 with both partials by Fourier differentiation.
Field grad_sq_density(const Field& u);

// result(i,j) = u(i-di, j-dj), indices mod n.
Field cyclic_shift(const Field& u, int di, int dj);

struct TranslatedMatch {
  double dist2 = 0.0;
  int di = 0;
  int dj = 0;
};

// Minimum over all n^2 cyclic shifts of |u - cyclic_shift(psi, di, dj)|_{L^2}^2.
// Candidate shifts come from an FFT cross-correlation; the winner is
// re-evaluated by direct summation, ties broken by smallest (di, dj).
TranslatedMatch min_translated_l2_sq(const Field& u, const Field& psi);

namespace fft {

using cplx = std::complex<double>;

// Half-spectrum size of the r2c layout: n rows, n/2+1 columns.
inline std::size_t spec_size(int n) { return static_cast<std::size_t>(n) * (n / 2 + 1); }

// Normalized coefficients uhat = FFT(u) / n^2, row-major n x (n/2+1).
void forward(const Field& u, std::vector<cplx>& out);
void inverse(const std::vector<cplx>& in, Field& out);  // out.grid must be set

// Wavenumber of row a (full convention, Nyquist kept) and of column b.
double kx_full(int a, int n, double side);
double ky_full(int b, int n, double side);
// First-derivative wavenumbers: the Nyquist mode is zeroed.
double kx_deriv(int a, int n, double side);
double ky_deriv(int b, int n, double side);
// Multiplicity of a stored column under conjugate symmetry.
double parseval_weight(int b, int n);

}  // namespace fft

namespace detail {

// Compensated (Kahan) summation.
double ksum(const double* a, std::size_t len);

// Plain row-major accumulation of h^2 sum (u - psi(.-shift))^2; shared by the
// translated-distance search so that an exhaustive oracle can match it bitwise.
double shifted_dist_sq_plain(const Field& u, const Field& psi, int di, int dj);

}  // namespace detail

}  // namespace chcrit
