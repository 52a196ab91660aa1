#pragma once

#include "chcrit/grid.hpp"
#include "chcrit/model.hpp"

namespace chcrit {

struct EnergyReport {
  double energy = 0.0;
  double grad_norm2 = 0.0;  // squared L2 norm of the projected gradient
  double lambda_phi = 0.0;
  double mean_value = 0.0;
};

// Renormalized energy: integral of (phi/2)|grad u|^2 + (G(u) - G(-1+phi))/phi.
double energy(const Field& u, const Model& m);

// Volume functional: integral of chi(u).
double nu_volume(const Field& u, const Model& m);

// Projected L2 gradient: project_zero_mean(-phi lap(u) + G'(u)/phi).
Field grad_l2(const Field& u, const Model& m);

// Mean multiplier estimate: mean(phi lap(u) - G'(u)/phi).
double lambda_phi_estimate(const Field& u, const Model& m);

EnergyReport energy_report(const Field& u, const Model& m);

// Semi-implicit step: uhat+ = (uhat - dt Nhat)/(1 + dt phi |k|^2) with
// N = G'(u)/phi projected to zero mean. dt is halved until the energy is
// nonincreasing (up to 1e-12 |E| + 1e-13); the accepted step size is written
// to *used_dt. The DC mode is copied through so the mean is preserved
// exactly; *energy_out receives the accepted state's energy. Throws
// std::invalid_argument for dt <= 0 and BlowUpError when no admissible step
// produces finite values.
Field descent_step(const Field& u, double dt, const Model& m,
                   double* used_dt = nullptr, double* energy_out = nullptr);

inline double default_dt(const Model& m) { return m.phi / 8.0; }

}  // namespace chcrit
