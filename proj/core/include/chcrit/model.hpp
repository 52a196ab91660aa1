#pragma once

namespace chcrit {

// Standard quartic double well G(u) = (1-u^2)^2 / 4.
double G(double u);
double Gp(double u);   // u^3 - u
double Gpp(double u);  // 3u^2 - 1

enum class Potential { standard_quartic };

// Everything defining the renormalized energy and the volume functional.
// chi rises from 0 to 1 over a window starting at chi_lo whose width is
// chi_window * (chi_hi - chi_lo); it is identically 0 below chi_lo and
// identically 1 above chi_lo + window (hence above chi_hi as well).
struct Model {
  double phi = 0.0;
  double xi = 0.0;
  Potential potential = Potential::standard_quartic;
  double chi_lo = 0.0;    // 1 - 2 phi^(1/3)
  double chi_hi = 0.0;    // 1 - phi^(1/3)
  double chi_window = 0.02;
};

Model make_model(double phi, double xi);

// Quintic smoothstep cutoff 6t^5 - 15t^4 + 10t^3 on the transition window;
// C^2 and monotone nondecreasing.
double chi(double s, const Model& m);
double chi_p(double s, const Model& m);

}  // namespace chcrit
