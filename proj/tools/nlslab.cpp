// Command-line front end: nlslab <subcommand> [--config PATH] [--out DIR] ...
#include <iostream>

#include "CLI11.hpp"
#include "nlslab/config.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nlslab: Dirac-train NLS laboratory"};
  app.require_subcommand(0, 1);
  std::string config_path;
  nlslab::RunOptions opts;
  int panels = 0;
  bool print_config = false;
  app.add_option("--config", config_path, "JSON config (defaults when omitted)");
  app.add_option("--out", opts.out_dir, "output directory (overrides config.output)");
  app.add_flag("--dump", opts.dump, "write per-snapshot CSVs");
  app.add_option("--panels", panels, "override picard.panels_per_decade");
  app.add_flag("--quiet", opts.quiet, "no progress output");
  app.add_flag("--print-config", print_config, "print the canonical config and exit");
  for (const auto& name : nlslab::subcommand_names())
    app.add_subcommand(name, "run the " + name + " experiment")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    nlslab::ExperimentConfig cfg = config_path.empty() ? nlslab::ExperimentConfig{} : nlslab::load_config(config_path);
    if (print_config) {
      std::cout << nlslab::dump_config(cfg);
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return 1;
    }
    if (panels != 0) opts.panels = panels;
    return nlslab::run_subcommand(app.get_subcommands().front()->get_name(), cfg, opts);
  } catch (const nlslab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const nlslab::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const nlslab::AcceptanceError& e) {
    std::cerr << "acceptance violation: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
