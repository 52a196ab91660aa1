#include "chcrit/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "chcrit/errors.hpp"
#include "chcrit/io.hpp"
#include "chcrit/levelset.hpp"
#include "chcrit/nucleation.hpp"
#include "chcrit/parallel.hpp"
#include "chcrit/spectral.hpp"

namespace chcrit {

namespace fs = std::filesystem;

namespace {

double to_real(const std::string& key, const std::string& val) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(val, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != val.size()) throw std::invalid_argument("bad numeric value for " + key);
  return v;
}

long long to_int(const std::string& key, const std::string& val) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(val, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != val.size()) throw std::invalid_argument("bad integer value for " + key);
  return v;
}

std::vector<std::string> split_list(const std::string& val) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(val);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string join_list(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << body;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

// Collects artifact names while commands write them, then hashes everything
// into out_dir/manifest.txt (inputs, config hash, artifact checksums).
struct Artifacts {
  fs::path dir;
  std::vector<std::string> inputs;
  std::vector<std::string> names;

  explicit Artifacts(const RunConfig& c) : dir(c.out_dir) { fs::create_directories(dir); }

  fs::path file(const std::string& name) {
    names.push_back(name);
    return dir / name;
  }

  void finish(const RunConfig& c) {
    std::string body = "config_hash " + hex64(fnv1a64_str(config_text(c))) + "\n";
    for (const std::string& in : inputs) body += "input " + in + "\n";
    std::sort(names.begin(), names.end());
    for (const std::string& name : names)
      body += "artifact " + name + " " + hex64(fnv1a64_file(dir / name)) + "\n";
    write_text(dir / "manifest.txt", body);
  }
};

std::string csv_observables_header() { return "phi,kind,interfacial,energy_gap,nu_gap,l2_gap,error"; }

std::string csv_observables_row(const ObservablesRow& r) {
  return fmt_g17(r.phi) + "," + kind_name(r.kind) + "," + fmt_g17(r.interfacial) + "," +
         fmt_g17(r.energy_gap) + "," + fmt_g17(r.nu_gap) + "," + fmt_g17(r.l2_gap) + "," +
         fmt_g17(r.error);
}

void write_observables_csv(const fs::path& p, const std::vector<ObservablesRow>& rows) {
  std::string body = csv_observables_header() + "\n";
  for (const auto& r : rows) body += csv_observables_row(r) + "\n";
  write_text(p, body);
}

Kind parse_kind(const std::string& s) {
  if (s == "minimizer") return Kind::minimizer;
  if (s == "saddle") return Kind::saddle;
  throw std::invalid_argument("kind must be minimizer or saddle");
}

Field load_field(const std::string& path) {
  if (path.empty()) throw std::invalid_argument("this mode requires field=<path to CHF1>");
  if (file_magic(path) != "CHF1") throw std::invalid_argument(path + " is not a CHF1 field");
  return read_field_chf1(path);
}

}  // namespace

void apply_kv(RunConfig& c, const std::map<std::string, std::string>& kv) {
  for (const auto& [raw, val] : kv) {
    std::string key = raw;
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "mode")
      c.mode = val;
    else if (key == "phi")
      c.phi = to_real(key, val);
    else if (key == "xi")
      c.xi = to_real(key, val);
    else if (key == "images")
      c.images = static_cast<int>(to_int(key, val));
    else if (key == "dt0")
      c.dt0 = to_real(key, val);
    else if (key == "tol_disp")
      c.tol_disp = to_real(key, val);
    else if (key == "tol_grad")
      c.tol_grad = to_real(key, val);
    else if (key == "max_iters")
      c.max_iters = to_int(key, val);
    else if (key == "out")
      c.out_dir = val;
    else if (key == "resume")
      c.resume_from = val;
    else if (key == "field")
      c.field = val;
    else if (key == "kind")
      c.kind = val;
    else if (key == "endpoints")
      c.endpoints = val;
    else if (key == "levels")
      c.levels = static_cast<int>(to_int(key, val));
    else if (key == "rays")
      c.rays = static_cast<int>(to_int(key, val));
    else if (key == "c_star")
      c.c_star = to_real(key, val);
    else if (key == "workers")
      c.workers = static_cast<int>(to_int(key, val));
    else if (key == "seed")
      c.seed = static_cast<unsigned long long>(to_int(key, val));
    else if (key == "checkpoint_every")
      c.checkpoint_every = to_int(key, val);
    else if (key == "inputs")
      c.inputs = split_list(val);
    else
      throw std::invalid_argument("unknown config key: " + raw);
  }
}

std::string config_text(const RunConfig& c) {
  std::string s;
  s += "mode=" + c.mode + "\n";
  s += "phi=" + fmt_g17(c.phi) + "\n";
  s += "xi=" + fmt_g17(c.xi) + "\n";
  s += "images=" + std::to_string(c.images) + "\n";
  s += "dt0=" + fmt_g17(c.dt0) + "\n";
  s += "tol_disp=" + fmt_g17(c.tol_disp) + "\n";
  s += "tol_grad=" + fmt_g17(c.tol_grad) + "\n";
  s += "max_iters=" + std::to_string(c.max_iters) + "\n";
  s += "out=" + c.out_dir + "\n";
  s += "resume=" + c.resume_from + "\n";
  s += "field=" + c.field + "\n";
  s += "kind=" + c.kind + "\n";
  s += "endpoints=" + c.endpoints + "\n";
  s += "levels=" + std::to_string(c.levels) + "\n";
  s += "rays=" + std::to_string(c.rays) + "\n";
  s += "c_star=" + fmt_g17(c.c_star) + "\n";
  s += "workers=" + std::to_string(c.workers) + "\n";
  s += "seed=" + std::to_string(c.seed) + "\n";
  s += "checkpoint_every=" + std::to_string(c.checkpoint_every) + "\n";
  s += "inputs=" + join_list(c.inputs) + "\n";
  return s;
}

MinimizeResult minimize_run(Field u0, const Model& m, const MinimizeOptions& opt) {
  if (opt.max_iters < 1 || opt.check_every < 1)
    throw std::invalid_argument("minimize_run: bad iteration limits");
  double cap = opt.dt0 > 0.0 ? opt.dt0 : default_dt(m);
  double dt = cap;
  double tol_g2 = opt.tol_grad * opt.tol_grad;

  MinimizeResult res;
  res.u = std::move(u0);
  int accepted = 0;
  for (long long k = 0; k < opt.max_iters; ++k) {
    double used = 0.0;
    Field next = descent_step(res.u, dt, m, &used);
    double disp = std::sqrt(l2_dist_sq(next, res.u));
    if (used < dt) {
      dt = used;
      accepted = 0;
    } else if (++accepted >= 50) {
      dt = std::min(2.0 * dt, cap);
      accepted = 0;
    }
    res.u = std::move(next);
    ++res.steps;
    if (k % opt.check_every == 0 || k == opt.max_iters - 1) {
      double g2 = l2_norm_sq(grad_l2(res.u, m));
      if (g2 <= tol_g2 && disp < opt.tol_displacement * used) {
        res.converged = true;
        break;
      }
    }
  }
  res.report = energy_report(res.u, m);
  return res;
}

int cmd_constants(const RunConfig& c) {
  NucleationConstants nc = critical_volumes(c.xi, 2);
  Artifacts art(c);

  std::vector<std::pair<std::string, std::string>> kv = {
      {"xi", fmt_g17(nc.xi)},
      {"d", std::to_string(nc.d)},
      {"c0", fmt_g17(nc.c0)},
      {"cbar1", fmt_g17(nc.cbar1)},
      {"exists_droplet", nc.exists_droplet ? "1" : "0"},
  };
  if (nc.exists_droplet) {
    kv.emplace_back("nu_s", fmt_g17(nc.nu_s));
    kv.emplace_back("c_s", fmt_g17(nc.c_s));
    kv.emplace_back("nu_m", fmt_g17(nc.nu_m));
    kv.emplace_back("c_m", fmt_g17(nc.c_m));
  }
  write_kv(art.file("constants.txt"), kv);

  std::string csv = "xi,d,c0,cbar1,exists_droplet,nu_s,c_s,nu_m,c_m\n";
  csv += fmt_g17(nc.xi) + "," + std::to_string(nc.d) + "," + fmt_g17(nc.c0) + "," +
         fmt_g17(nc.cbar1) + "," + (nc.exists_droplet ? "1" : "0");
  if (nc.exists_droplet)
    csv += "," + fmt_g17(nc.nu_s) + "," + fmt_g17(nc.c_s) + "," + fmt_g17(nc.nu_m) + "," +
           fmt_g17(nc.c_m);
  else
    csv += ",,,,";
  csv += "\n";
  write_text(art.file("constants.csv"), csv);

  art.finish(c);
  return nc.exists_droplet ? exit_ok : exit_no_droplet;
}

int cmd_minimize(const RunConfig& c) {
  NucleationConstants nc = critical_volumes(c.xi, 2);
  Artifacts art(c);
  if (!nc.exists_droplet) {
    write_kv(art.file("summary.txt"), {{"exists_droplet", "0"}});
    art.finish(c);
    return exit_no_droplet;
  }

  Grid g = make_grid(c.phi, c.xi);
  Model m = make_model(c.phi, c.xi);
  Field u0(g);
  if (!c.resume_from.empty()) {
    art.inputs.push_back(c.resume_from);
    if (file_magic(c.resume_from) != "CHF1")
      throw std::invalid_argument("minimize resume expects a CHF1 field");
    u0 = read_field_chf1(c.resume_from);
    if (!(u0.grid == g))
      throw std::invalid_argument("resume field grid does not match phi/xi");
  } else {
    u0 = droplet_ansatz(nc.nu_m, m, g);
  }

  MinimizeOptions opt;
  opt.dt0 = c.dt0;
  opt.tol_displacement = c.tol_disp;
  opt.tol_grad = c.tol_grad;
  if (c.max_iters > 0) opt.max_iters = c.max_iters;
  MinimizeResult res = minimize_run(std::move(u0), m, opt);

  write_field_chf1(art.file("minimizer.chf1"), res.u);
  ObservablesRow row = observables_row(res.u, Kind::minimizer, m, nc);
  write_observables_csv(art.file("observables.csv"), {row});
  write_kv(art.file("summary.txt"),
           {{"converged", res.converged ? "1" : "0"},
            {"steps", std::to_string(res.steps)},
            {"energy", fmt_g17(res.report.energy)},
            {"grad_norm2", fmt_g17(res.report.grad_norm2)},
            {"lambda_phi", fmt_g17(res.report.lambda_phi)},
            {"mean_value", fmt_g17(res.report.mean_value)},
            {"energy_gap", fmt_g17(row.energy_gap)},
            {"nu_gap", fmt_g17(row.nu_gap)}});
  art.finish(c);
  return res.converged ? exit_ok : exit_not_converged;
}

int cmd_string(const RunConfig& c) {
  NucleationConstants nc = critical_volumes(c.xi, 2);
  Artifacts art(c);
  if (!nc.exists_droplet) {
    write_kv(art.file("summary.txt"), {{"exists_droplet", "0"}});
    art.finish(c);
    return exit_no_droplet;
  }

  Grid g = make_grid(c.phi, c.xi);
  Model m = make_model(c.phi, c.xi);

  StringConfig scfg;
  scfg.m_images = (c.images > 0 ? c.images : default_image_count(g)) - 1;
  scfg.dt = c.dt0;
  scfg.max_outer_iters = c.max_iters > 0 ? static_cast<int>(c.max_iters) : 2000;
  scfg.tol_displacement = c.tol_disp;
  scfg.tol_grad = c.tol_grad;

  StringState s;
  std::string resume_magic = c.resume_from.empty() ? "" : file_magic(c.resume_from);
  if (resume_magic == "CHS1") {
    art.inputs.push_back(c.resume_from);
    s = read_string_chs1(c.resume_from);
    if (!(s.images[0].grid == g))
      throw std::invalid_argument("resume string grid does not match phi/xi");
  } else {
    Field a(g, -1.0 + c.phi);
    Field b = a;
    if (c.endpoints == "constant-droplet") {
      if (resume_magic == "CHF1") {
        art.inputs.push_back(c.resume_from);
        b = read_field_chf1(c.resume_from);
        if (!(b.grid == g))
          throw std::invalid_argument("resume field grid does not match phi/xi");
      } else if (!c.resume_from.empty()) {
        throw std::invalid_argument("string resume expects a CHS1 or CHF1 file");
      } else {
        b = droplet_ansatz(nc.nu_m, m, g);
      }
    } else if (c.endpoints != "constant-constant") {
      throw std::invalid_argument("endpoints must be constant-droplet or constant-constant");
    }
    s = init_linear(a, b, scfg.m_images);
  }

  fs::path checkpoint = art.file("string.chs1");
  auto on_barrier = [&](const StringState& st) { write_string_chs1(checkpoint, st); };
  ConvergenceReport rep =
      run_string(s, scfg, m, on_barrier,
                 c.checkpoint_every > 0 ? static_cast<int>(c.checkpoint_every) : 0);
  write_string_chs1(checkpoint, s);

  std::string profile = "alpha,energy,grad2\n";
  for (std::size_t i = 0; i < rep.energies.size(); ++i)
    profile +=
        fmt_g17(rep.alpha[i]) + "," + fmt_g17(rep.energies[i]) + "," + fmt_g17(rep.grad2[i]) + "\n";
  write_text(art.file("profile.csv"), profile);

  std::vector<std::pair<std::string, std::string>> summary = {
      {"converged", rep.converged ? "1" : "0"},
      {"displacement_converged", rep.displacement_converged ? "1" : "0"},
      {"iters", std::to_string(rep.iters)},
      {"last_displacement", fmt_g17(rep.last_displacement)},
  };

  std::optional<SaddleExtract> saddle;
  try {
    saddle = extract_saddle(s, m);
  } catch (const NoSaddleError& e) {
    summary.emplace_back("saddle", "none");
    summary.emplace_back("saddle_error", e.what());
    write_kv(art.file("summary.txt"), summary);
    art.finish(c);
    return exit_no_saddle;
  }

  write_field_chf1(art.file("saddle.chf1"), saddle->u);
  std::vector<ObservablesRow> rows = {
      observables_row(s.images.front(), Kind::minimizer, m, nc),
      observables_row(s.images.back(), Kind::minimizer, m, nc),
      observables_row(saddle->u, Kind::saddle, m, nc),
  };
  write_observables_csv(art.file("observables.csv"), rows);

  summary.emplace_back("saddle_index", std::to_string(saddle->index));
  summary.emplace_back("grad2_at_saddle", fmt_g17(saddle->grad2_at_index));
  summary.emplace_back("saddle_residual2", fmt_g17(rows[2].error));
  summary.emplace_back("refined_s", fmt_g17(saddle->refined_s));
  summary.emplace_back("unimodal", saddle->unimodal ? "1" : "0");
  summary.emplace_back("saddle_energy_gap", fmt_g17(rows[2].energy_gap));
  write_kv(art.file("summary.txt"), summary);
  art.finish(c);
  return rep.displacement_converged ? exit_ok : exit_not_converged;
}

int cmd_diagnose(const RunConfig& c) {
  Field u = load_field(c.field);
  Model m = make_model(u.grid.phi, u.grid.xi);
  NucleationConstants nc = critical_volumes(u.grid.xi, 2);
  Artifacts art(c);
  art.inputs.push_back(c.field);
  if (!nc.exists_droplet) {
    write_kv(art.file("summary.txt"), {{"exists_droplet", "0"}});
    art.finish(c);
    return exit_no_droplet;
  }

  ObservablesRow row = observables_row(u, parse_kind(c.kind), m, nc);
  write_observables_csv(art.file("observables.csv"), {row});
  write_kv(art.file("summary.txt"), {{"kind", c.kind},
                                     {"phi", fmt_g17(u.grid.phi)},
                                     {"xi", fmt_g17(u.grid.xi)},
                                     {"energy_gap", fmt_g17(row.energy_gap)},
                                     {"nu_gap", fmt_g17(row.nu_gap)},
                                     {"l2_gap", fmt_g17(row.l2_gap)},
                                     {"interfacial", fmt_g17(row.interfacial)},
                                     {"error", fmt_g17(row.error)}});
  art.finish(c);
  return exit_ok;
}

int cmd_geometry(const RunConfig& c) {
  Field u = load_field(c.field);
  Model m = make_model(u.grid.phi, u.grid.xi);
  Artifacts art(c);
  art.inputs.push_back(c.field);

  ConvexityReport cv = convexity_scan(u, c.levels);
  std::string body = "level,superlevel_convex,sublevel_convex,superlevel_multi,sublevel_multi\n";
  for (std::size_t k = 0; k < cv.levels.size(); ++k)
    body += fmt_g17(cv.levels[k]) + "," + std::to_string(cv.superlevel_convex[k]) + "," +
            std::to_string(cv.sublevel_convex[k]) + "," + std::to_string(cv.superlevel_multi[k]) +
            "," + std::to_string(cv.sublevel_multi[k]) + "\n";
  write_text(art.file("convexity.csv"), body);

  Field centered = recenter_at_max(u);
  body = "level,loop,x,y\n";
  for (double level : cv.levels) {
    Contour ct = contour(centered, level);
    for (std::size_t li = 0; li < ct.loops.size(); ++li)
      for (std::size_t k = 0; k < ct.loops[li].x.size(); ++k)
        body += fmt_g17(level) + "," + std::to_string(li) + "," + fmt_g17(ct.loops[li].x[k]) +
                "," + fmt_g17(ct.loops[li].y[k]) + "\n";
  }
  write_text(art.file("contours.csv"), body);

  std::vector<RayViolation> viol = ray_monotonicity(u, c.rays);
  body = "ray,t,increase\n";
  for (const RayViolation& v : viol)
    body += std::to_string(v.ray) + "," + fmt_g17(v.t) + "," + fmt_g17(v.increase) + "\n";
  write_text(art.file("rays.csv"), body);

  std::vector<std::pair<std::string, std::string>> summary = {
      {"t_star_lo", fmt_g17(cv.t_star_lo)},
      {"t_star_hi", fmt_g17(cv.t_star_hi)},
      {"ray_violations", std::to_string(viol.size())},
  };

  double umax = *std::max_element(u.values.begin(), u.values.end());
  if (c.c_star < umax) {
    H2Report h2 = h2_scan(u, m, c.c_star, c.levels);
    body = "c,f,fp\n";
    for (const H2Row& r : h2.rows)
      body += fmt_g17(r.c) + "," + fmt_g17(r.f) + "," + fmt_g17(r.fp) + "\n";
    write_text(art.file("h2.csv"), body);
    summary.emplace_back("h2_holds", h2.h2_holds ? "1" : "0");
    summary.emplace_back("lambda_phi", fmt_g17(h2.lambda_phi));
    summary.emplace_back("u_max", fmt_g17(h2.u_max));
  } else {
    summary.emplace_back("h2_skipped", "c_star >= max(u)");
    summary.emplace_back("u_max", fmt_g17(umax));
  }
  write_kv(art.file("summary.txt"), summary);
  art.finish(c);
  return exit_ok;
}

int cmd_table(const RunConfig& c) {
  if (c.inputs.empty()) throw std::invalid_argument("table requires inputs=<csv,csv,...>");
  std::vector<ObservablesRow> rows;
  for (const std::string& path : c.inputs) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != csv_observables_header())
      throw std::runtime_error(path + ": unexpected CSV header");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::string cell;
      std::istringstream ls(line);
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      if (cells.size() != 7) throw std::runtime_error(path + ": malformed row");
      ObservablesRow r;
      r.phi = to_real("phi", cells[0]);
      r.kind = parse_kind(cells[1]);
      r.interfacial = to_real("interfacial", cells[2]);
      r.energy_gap = to_real("energy_gap", cells[3]);
      r.nu_gap = to_real("nu_gap", cells[4]);
      r.l2_gap = to_real("l2_gap", cells[5]);
      r.error = to_real("error", cells[6]);
      rows.push_back(r);
    }
  }

  std::stable_sort(rows.begin(), rows.end(), [](const ObservablesRow& a, const ObservablesRow& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.phi > b.phi;
  });

  Artifacts art(c);
  art.inputs = c.inputs;
  std::string raw = csv_observables_header() + "\n";
  for (const auto& r : rows) raw += csv_observables_row(r) + "\n";
  write_text(art.file("raw.csv"), raw);

  std::string rates = "phi,obs,log2_ratio\n";
  std::vector<std::pair<std::string, std::string>> summary = {
      {"rows", std::to_string(rows.size())}};
  for (Kind kind : {Kind::minimizer, Kind::saddle}) {
    std::vector<ObservablesRow> group;
    for (const auto& r : rows)
      if (r.kind == kind) group.push_back(r);
    if (group.size() < 2) continue;
    try {
      for (const RateRow& r : rate_table(group))
        rates += fmt_g17(r.phi) + "," + r.obs + "," +
                 (std::isnan(r.log2_ratio) ? std::string() : fmt_g17(r.log2_ratio)) + "\n";
      summary.emplace_back("rates_" + kind_name(kind), "ok");
    } catch (const std::invalid_argument& e) {
      summary.emplace_back("rates_" + kind_name(kind), std::string("skipped: ") + e.what());
    }
  }
  write_text(art.file("rates.csv"), rates);
  write_kv(art.file("summary.txt"), summary);
  art.finish(c);
  return exit_ok;
}

int run(const RunConfig& c) {
  if (c.workers > 0) set_worker_count(c.workers);
  if (c.mode == "constants") return cmd_constants(c);
  if (c.mode == "minimize") return cmd_minimize(c);
  if (c.mode == "string") return cmd_string(c);
  if (c.mode == "diagnose") return cmd_diagnose(c);
  if (c.mode == "geometry") return cmd_geometry(c);
  if (c.mode == "table") return cmd_table(c);
  throw std::invalid_argument("unknown mode: " + c.mode);
}

}  // namespace chcrit
