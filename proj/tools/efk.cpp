#include <iostream>

#include <CLI11.hpp>

#include "efk/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Delayed extended Fisher-Kolmogorov solver"};
  app.require_subcommand(1, 1);

  efk::CommandOptions opt;
  std::string config;
  std::string fault;
  for (const char* name : {"check", "solve-ivp", "find-periodic", "verify-stability", "selftest"}) {
    auto* sub = app.add_subcommand(name);
    auto* cfg = sub->add_option("--config", config, "JSON configuration file");
    if (std::string(name) != "selftest") cfg->required();
    sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--jobs", opt.jobs, "Worker threads for the periodic map")->check(CLI::PositiveNumber);
    sub->add_flag("--certificate", opt.certificate, "Refuse unless every hypothesis is decided and holds");
    if (std::string(name) == "solve-ivp") {
      sub->add_flag("--residual-check", opt.residual_check, "Append the mild-solution residual column");
    }
    if (std::string(name) == "selftest") {
      sub->add_option("--inject-fault", fault, "Deliberate fault")->check(CLI::IsMember({"g2-typo", "step-overrun"}));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : efk::kExitConfig;
  }

  opt.command = app.get_subcommands().front()->get_name();
  if (!config.empty()) opt.config_path = config;
  if (!fault.empty()) opt.inject_fault = fault;
  return efk::run_command(opt, std::cout, std::cerr);
}
