#pragma once

#include <map>
#include <string>
#include <vector>

#include "chcrit/diagnostics.hpp"
#include "chcrit/string_method.hpp"

namespace chcrit {

enum ExitCode {
  exit_ok = 0,
  exit_error = 1,
  exit_no_droplet = 2,
  exit_not_converged = 3,
  exit_no_saddle = 4,
};

struct RunConfig {
  std::string mode;  // constants | minimize | string | diagnose | geometry | table
  double phi = 0.1;
  double xi = 2.3;
  int images = 0;             // image count M+1; 0 selects the grid default
  double dt0 = 0.0;           // 0 selects phi/8
  double tol_disp = 5e-3;
  double tol_grad = 1e-3;
  long long max_iters = 0;    // 0 selects the mode default
  std::string out_dir = "out";
  std::string resume_from;    // CHF1 (warm start) or CHS1 (string resume)
  std::string field;          // input CHF1 for diagnose/geometry
  std::string kind = "minimizer";
  std::string endpoints = "constant-droplet";  // or constant-constant
  int levels = 16;
  int rays = 64;
  double c_star = 0.6;
  int workers = 0;            // 0 = available cores
  unsigned long long seed = 0;
  long long checkpoint_every = 50;
  std::vector<std::string> inputs;  // observables CSVs for table mode
};

// Applies config-file pairs onto c; unknown keys throw std::invalid_argument.
void apply_kv(RunConfig& c, const std::map<std::string, std::string>& kv);

// Canonical serialization used for the manifest's config hash.
std::string config_text(const RunConfig& c);

// Steepest-descent driver shared by cmd_minimize and the tests. Convergence
// (grad norm <= tol_grad and step displacement < tol_displacement * used dt)
// is tested every check_every steps.
struct MinimizeOptions {
  double dt0 = 0.0;
  double tol_displacement = 5e-3;
  double tol_grad = 1e-3;
  long long max_iters = 20000;
  int check_every = 200;
};

struct MinimizeResult {
  Field u;
  bool converged = false;
  long long steps = 0;
  EnergyReport report;
};

MinimizeResult minimize_run(Field u0, const Model& m, const MinimizeOptions& opt);

int cmd_constants(const RunConfig& c);
int cmd_minimize(const RunConfig& c);
int cmd_string(const RunConfig& c);
int cmd_diagnose(const RunConfig& c);
int cmd_geometry(const RunConfig& c);
int cmd_table(const RunConfig& c);

// Dispatches on c.mode after applying the worker count.
int run(const RunConfig& c);

}  // namespace chcrit
