#pragma once

#include <string>
#include <vector>

#include "chcrit/grid.hpp"
#include "chcrit/model.hpp"
#include "chcrit/nucleation.hpp"

namespace chcrit {

enum class Kind { minimizer, saddle };

std::string kind_name(Kind k);

struct ObservablesRow {
  double phi = 0.0;
  Kind kind = Kind::minimizer;
  double interfacial = 0.0;  // measure of the band [-1+2 phi^(1/3), 1-2 phi^(1/3)]
  double energy_gap = 0.0;   // |E(u) - c_ref|
  double nu_gap = 0.0;       // |nu(u) - nu_ref|
  double l2_gap = 0.0;       // min-translated squared L2 distance to Psi_ref
  double error = 0.0;        // squared norm of the projected gradient
};

// h^2 * count of samples with -1+2 phi^(1/3) <= u <= 1-2 phi^(1/3).
double interfacial_measure(const Field& u, const Model& m);

// References by kind: (c_m, nu_m) for minimizers, (c_s, nu_s) for saddles;
// Psi_ref is the sharp profile of the reference volume on u's grid.
ObservablesRow observables_row(const Field& u, Kind kind, const Model& m,
                               const NucleationConstants& nc);

struct RateRow {
  double phi = 0.0;          // the finer phi of the pair
  std::string obs;
  double log2_ratio = 0.0;   // NaN encodes a blank entry
};

// rows sorted by descending phi with consecutive ratio exactly 2; emits
// log2(value at 2 phi / value at phi) per observable and adjacent pair.
// A zero numerator or denominator yields a blank (NaN), never infinity.
std::vector<RateRow> rate_table(const std::vector<ObservablesRow>& rows);

}  // namespace chcrit
