// thrustdir command-line front end: run | fit | preset.
#include <CLI11.hpp>

#include <iostream>

#include "thrustdir/cli.hpp"

using namespace thrustdir;

int main(int argc, char** argv) {
  CLI::App app{"Thrust-direction velocity control simulator"};
  app.require_subcommand(1);
  app.footer(cli::schema_help());

  cli::RunCommand run;
  std::string controller;
  double dt = 0.0;
  int decimation = 0;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario file");
  run_cmd->add_option("scenario", run.scenario_path, "Scenario YAML file")->required();
  run_cmd->add_option("--controller", controller, "Override controller: fp | fa")
      ->check(CLI::IsMember({"fp", "fa"}));
  run_cmd->add_option("--dt", dt, "Override integration step [s]")->check(CLI::PositiveNumber);
  run_cmd->add_option("--decimation", decimation, "Override log decimation")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run.out,
                      "Trace CSV path; the summary goes to <out>.summary.txt");

  cli::FitCommand fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit (c0, c1) to a coefficient table");
  fit_cmd->add_option("table", fit.table_path, "CSV with header alpha_deg,cl,cd")->required();
  fit_cmd->add_option("--weighting", fit.weighting, "uniform | relative")
      ->check(CLI::IsMember({"uniform", "relative"}));
  fit_cmd->add_option("--out", fit.out, "Write report and scenario fragment here");

  cli::PresetCommand pre;
  auto* pre_cmd = app.add_subcommand("preset", "Print a complete preset scenario");
  pre_cmd->add_option("name", pre.name, "c701-fig4 | c701-fig5 | hover | prop3-kinematic")
      ->required();
  pre_cmd->add_flag("--computed-ka", pre.options.computed_ka,
                    "Truth ka = rho Sigma / 2 = 0.323 instead of 0.3");
  pre_cmd->add_flag("--perturbed-table", pre.options.perturbed_table,
                    "Truth aero from a trig table with +-10% ripple");
  pre_cmd->add_option("--out", pre.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*run_cmd) {
    if (!controller.empty()) run.controller = controller;
    if (dt > 0.0) run.dt = dt;
    if (decimation > 0) run.decimation = decimation;
    return cli::cmd_run(run, std::cout, std::cerr);
  }
  if (*fit_cmd) return cli::cmd_fit(fit, std::cout, std::cerr);
  return cli::cmd_preset(pre, std::cout, std::cerr);
}
