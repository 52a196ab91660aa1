#pragma once

#include <functional>
#include <utility>

#include "chcrit/grid.hpp"
#include "chcrit/model.hpp"

namespace chcrit {

// Sharp-interface constants for f_xi(nu) = cbar1 nu^((d-1)/d) - 4 nu
// + 4 xi^-(d+1) nu^2. When exists_droplet is false the nu/c fields are NaN.
struct NucleationConstants {
  int d = 2;
  double xi = 0.0;
  double c0 = 0.0;
  double cbar1 = 0.0;
  bool exists_droplet = false;
  double nu_s = 0.0, c_s = 0.0;  // local max of f_xi
  double nu_m = 0.0, c_m = 0.0;  // local min of f_xi
};

// Interface energy constant: integral over [-1,1] of sqrt(2 G(s)) by adaptive
// quadrature. The no-argument overload evaluates the standard quartic.
double interface_c0();
double interface_c0(const std::function<double(double)>& g);

// Surface area of the unit sphere in R^d (sigma_2 = 2 pi).
double sphere_area(int d);
double cbar1(int d);

double f_xi(double nu, double xi, int d);        // throws for nu < 0
double f_xi_prime(double nu, double xi, int d);

// Stationary volumes of f_xi by bracketed bisection to 1e-12 absolute.
// exists_droplet = false when f' has no positive root pair.
NucleationConstants critical_volumes(double xi, int d);

// (tilde_xi_d, xi_d): xi where the droplet branch appears (double root of f')
// and where c_m crosses zero; nested bisection, both to 1e-9.
std::pair<double, double> bifurcation_xis(int d);

// +1 inside the centered disc of volume nu, -1 outside; cell centers decide.
// Throws when the disc does not fit (2 sqrt(nu/pi) >= side).
Field sharp_profile_psi(double nu, const Grid& g);

// tanh((sqrt(nu/pi) - |x - center|) / (sqrt(2) phi)), shifted additively to
// mean -1+phi.
Field droplet_ansatz(double nu, const Model& m, const Grid& g);

}  // namespace chcrit
