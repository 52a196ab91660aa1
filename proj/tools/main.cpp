#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "chcrit/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Critical nuclei of the renormalized Cahn-Hilliard energy on the 2-torus"};
  app.require_subcommand(1);

  chcrit::RunConfig c;
  app.add_option("--phi", c.phi, "Volume fraction parameter");
  app.add_option("--xi", c.xi, "Regime parameter");
  app.add_option("--images", c.images, "String image count (0 = grid default)");
  app.add_option("--dt0", c.dt0, "Base step size (0 = phi/8)");
  app.add_option("--tol-disp", c.tol_disp, "Displacement tolerance")->capture_default_str();
  app.add_option("--tol-grad", c.tol_grad, "Gradient-norm tolerance")->capture_default_str();
  app.add_option("--max-iters", c.max_iters, "Iteration budget (0 = mode default)");
  app.add_option("--out", c.out_dir, "Output directory")->capture_default_str();
  app.add_option("--resume", c.resume_from, "CHF1 warm start or CHS1 string resume");
  app.add_option("--field", c.field, "CHF1 input for diagnose/geometry");
  app.add_option("--kind", c.kind, "Observables kind: minimizer | saddle")->capture_default_str();
  app.add_option("--endpoints", c.endpoints, "String endpoints: constant-droplet | constant-constant")->capture_default_str();
  app.add_option("--levels", c.levels, "Level count for geometry scans")->capture_default_str();
  app.add_option("--rays", c.rays, "Ray count for monotonicity checks")->capture_default_str();
  app.add_option("--c-star", c.c_star, "Lower bound of the H2 scan window")->capture_default_str();
  app.add_option("--workers", c.workers, "Worker cap (0 = available cores)");
  app.add_option("--seed", c.seed, "Seed for randomized initialization");
  app.add_option("--checkpoint-every", c.checkpoint_every, "Outer iterations between checkpoints")->capture_default_str();
  app.add_option("--inputs", c.inputs, "Observables CSVs for table mode")->delimiter(',');
  app.set_config("--config", "", "Read options from a key=value file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  const char* modes[] = {"constants", "minimize", "string", "diagnose", "geometry", "table"};
  const char* descs[] = {
      "Sharp-interface constants and critical volumes",
      "Steepest descent to the droplet minimizer",
      "Simplified string method saddle search",
      "Observables of a stored field",
      "Level-set geometry of a stored field",
      "Aggregate observables CSVs into raw and rate tables",
  };
  for (int k = 0; k < 6; ++k) {
    CLI::App* sub = app.add_subcommand(modes[k], descs[k]);
    sub->fallthrough();
    if (std::string(modes[k]) == "diagnose" || std::string(modes[k]) == "geometry")
      sub->add_option("field", c.field, "CHF1 input");
    if (std::string(modes[k]) == "table")
      sub->add_option("inputs", c.inputs, "Observables CSVs");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  c.mode = app.get_subcommands().front()->get_name();
  try {
    return chcrit::run(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return chcrit::exit_error;
  }
}
