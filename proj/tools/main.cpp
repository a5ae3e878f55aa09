// Command line front end for the lurecert library.
//
// Subcommands:
//   certify      check contraction and dissipation certificates for a config
//   threshold    bisect for the largest certifiable nonlinearity scale
//   simulate     integrate the configured trajectories and write CSV files
//   verify       check incremental estimates on simulated trajectory pairs
//   equilibrium  solve for the forced equilibrium and probe uniqueness
//   example1     run the built-in three-state study end to end
//   example2     run the built-in four-state study end to end
//
// Exit codes: 0 success, 1 mathematical failure (certificate or estimate does
// not hold, iteration diverged), 2 usage or configuration error.

#include "lurecert/commands.hpp"

#include <CLI11.hpp>

#include <functional>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{"certify incremental stability of forced positive Lur'e "
               "systems and verify the estimates on trajectories"};
  app.require_subcommand(1);

  lurecert::CommandOptions opt;
  opt.out_dir = "out";

  struct Entry {
    std::string name;
    std::string help;
    bool needs_config;
    std::function<int(const lurecert::CommandOptions&)> run;
  };
  const std::vector<Entry> entries = {
      {"certify", "check certificates for a config", true,
       lurecert::cmd_certify},
      {"threshold", "bisect for the largest certifiable scale", true,
       lurecert::cmd_threshold},
      {"simulate", "integrate trajectories and write CSV files", true,
       lurecert::cmd_simulate},
      {"verify", "check incremental estimates on trajectory pairs", true,
       lurecert::cmd_verify},
      {"equilibrium", "solve the forced equilibrium and probe uniqueness",
       true, lurecert::cmd_equilibrium},
      {"example1", "run the built-in three-state study", false,
       lurecert::cmd_example1},
      {"example2", "run the built-in four-state study", false,
       lurecert::cmd_example2},
  };

  std::function<int(const lurecert::CommandOptions&)> selected;
  for (const Entry& entry : entries) {
    CLI::App* sub = app.add_subcommand(entry.name, entry.help);
    if (entry.needs_config)
      sub->add_option("--config", opt.config_path, "problem config (YAML)")
          ->required();
    sub->add_option("--out", opt.out_dir,
                    "output directory for reports and CSV files");
    sub->add_option("--dt", opt.dt, "override the integration step");
    sub->add_option("--horizon", opt.horizon,
                    "override the simulation horizon");
    sub->add_option("--seed", opt.seed, "override the window sampling seed");
    sub->add_option("--tol", opt.tol, "override the check tolerance");
    sub->add_option("--threads", opt.threads,
                    "simulation worker threads (default: LURECERT_THREADS or "
                    "hardware)");
    sub->add_flag("--plot", opt.plots, "also write SVG line plots");
    sub->callback([&selected, &entry] { selected = entry.run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : 2;
  }
  return selected(opt);
}
