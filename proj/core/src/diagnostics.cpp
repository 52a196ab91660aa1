#include "chcrit/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "chcrit/energy.hpp"
#include "chcrit/spectral.hpp"

namespace chcrit {

std::string kind_name(Kind k) { return k == Kind::minimizer ? "minimizer" : "saddle"; }

double interfacial_measure(const Field& u, const Model& m) {
  double edge = 2.0 * std::cbrt(m.phi);
  double lo = -1.0 + edge, hi = 1.0 - edge;
  std::size_t count = 0;
  for (double v : u.values) count += lo <= v && v <= hi;
  return static_cast<double>(count) * u.grid.cell_area();
}

ObservablesRow observables_row(const Field& u, Kind kind, const Model& m,
                               const NucleationConstants& nc) {
  if (!nc.exists_droplet)
    throw std::invalid_argument("observables_row: no droplet branch at this xi");
  double c_ref = kind == Kind::minimizer ? nc.c_m : nc.c_s;
  double nu_ref = kind == Kind::minimizer ? nc.nu_m : nc.nu_s;
  Field psi = sharp_profile_psi(nu_ref, u.grid);

  ObservablesRow row;
  row.phi = m.phi;
  row.kind = kind;
  row.interfacial = interfacial_measure(u, m);
  row.energy_gap = std::abs(energy(u, m) - c_ref);
  row.nu_gap = std::abs(nu_volume(u, m) - nu_ref);
  row.l2_gap = min_translated_l2_sq(u, psi).dist2;
  row.error = l2_norm_sq(grad_l2(u, m));
  return row;
}

std::vector<RateRow> rate_table(const std::vector<ObservablesRow>& rows) {
  if (rows.size() < 2) throw std::invalid_argument("rate_table: need at least two rows");
  static const char* names[] = {"interfacial", "energy_gap", "nu_gap", "l2_gap", "error"};
  auto pick = [](const ObservablesRow& r, int k) {
    switch (k) {
      case 0: return r.interfacial;
      case 1: return r.energy_gap;
      case 2: return r.nu_gap;
      case 3: return r.l2_gap;
      default: return r.error;
    }
  };

  std::vector<RateRow> out;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const ObservablesRow& coarse = rows[i];
    const ObservablesRow& fine = rows[i + 1];
    if (coarse.kind != fine.kind) throw std::invalid_argument("rate_table: mixed kinds");
    if (std::abs(coarse.phi - 2.0 * fine.phi) > 1e-9 * coarse.phi)
      throw std::invalid_argument("rate_table: consecutive phi must halve");
    for (int k = 0; k < 5; ++k) {
      double num = pick(coarse, k), den = pick(fine, k);
      double ratio = (num == 0.0 || den == 0.0) ? std::nan("") : std::log2(num / den);
      out.push_back({fine.phi, names[k], ratio});
    }
  }
  return out;
}

}  // namespace chcrit
