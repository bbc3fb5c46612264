#include "ricci2d/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace ricci2d;

namespace {

void add_source(CLI::App *cmd, ScenarioSource &src, bool overrides)
{
  cmd->add_option("--config", src.config, "Scenario INI file")->check(CLI::ExistingFile);
  cmd->add_option("--scenario", src.scenario, "Built-in scenario: flat, bump, cigar, cone, finite_area");
  if (overrides) {
    cmd->add_option("--t-end", src.t_end, "Final time");
    cmd->add_option("--grid-n", src.grid_n, "Points per axis");
    cmd->add_option("--scheme", src.scheme, "explicit or implicit");
  }
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Conformal Ricci flow on the plane"};
  app.require_subcommand(1);

  RunCommand run;
  auto *run_cmd = app.add_subcommand("run", "Evolve a scenario and write monitors, snapshots and reports");
  add_source(run_cmd, run.source, true);
  run_cmd->add_option("--out", run.out_dir, "Output directory")->required();
  run_cmd->add_flag("--allow-extinction", run.allow_extinction, "Run finite-area data until extinction");

  ScenarioSource ap;
  auto *ap_cmd = app.add_subcommand("aperture", "Aperture of the initial metric");
  add_source(ap_cmd, ap, false);

  ScenarioSource cl;
  auto *cl_cmd = app.add_subcommand("classify", "Global existence verdict for the initial metric");
  add_source(cl_cmd, cl, true);

  std::filesystem::path verify_dir;
  auto *verify_cmd = app.add_subcommand("verify", "Re-check a finished run from its stored outputs");
  verify_cmd->add_option("--out", verify_dir, "Run directory")->required();

  std::filesystem::path fit_dir;
  std::optional<double> t_min, t_max;
  auto *fit_cmd = app.add_subcommand("fit", "Re-fit decay exponents on a stored series");
  fit_cmd->add_option("--out", fit_dir, "Run directory")->required();
  fit_cmd->add_option("--t-min", t_min, "Start of the fit window");
  fit_cmd->add_option("--t-max", t_max, "End of the fit window");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*run_cmd)
    return cmd_run(run, std::cout, std::cerr);
  if (*ap_cmd)
    return cmd_aperture(ap, std::cout, std::cerr);
  if (*cl_cmd)
    return cmd_classify(cl, std::cout, std::cerr);
  if (*verify_cmd)
    return cmd_verify(verify_dir, std::cout, std::cerr);
  return cmd_fit(fit_dir, t_min, t_max, std::cout, std::cerr);
}
