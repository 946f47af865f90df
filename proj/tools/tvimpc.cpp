#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tvimpc/config.hpp"
#include "tvimpc/errors.hpp"
#include "tvimpc/sim.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Time-varying internal-model servo controller simulator"};
  std::string config_path;
  std::string output;
  std::string suite;
  std::optional<std::size_t> horizon;
  bool list = false;
  int verbose = 0;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("-o,--output", output, "output directory (overrides the config)");
  app.add_option("-s,--suite", suite, "built-in suite to run (overrides the config)");
  app.add_option("--horizon", horizon, "step count for every scenario");
  app.add_flag("--list-scenarios", list, "print built-in scenarios and suites, then exit");
  app.add_flag("-v,--verbose", verbose, "more logging; repeat for the list of applied defaults");
  app.add_flag("-q,--quiet", quiet, "only errors");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    std::cout << "scenarios:\n";
    for (const auto& n : tvimpc::scenarios::names()) std::cout << "  " << n << '\n';
    std::cout << "suites:\n";
    for (const auto& n : tvimpc::scenarios::suite_names()) std::cout << "  " << n << '\n';
    return 0;
  }

  try {
    tvimpc::RunConfig cfg;
    if (!config_path.empty()) {
      cfg = tvimpc::parse_config(config_path);
    } else if (suite.empty()) {
      std::cerr << "nothing to run: give --config or --suite\n" << app.help();
      return 2;
    }
    if (!suite.empty()) {
      (void)tvimpc::scenarios::suite_by_name(suite);
      cfg.suite = suite;
    }
    if (!output.empty()) cfg.output_dir = output;
    if (horizon) cfg.horizon = *horizon;
    cfg.verbosity = quiet ? 0 : cfg.verbosity + verbose;
    return tvimpc::run(cfg, std::cerr);
  } catch (const tvimpc::ParseError& err) {
    std::cerr << "parse error (line " << err.line() << "): " << err.what() << '\n';
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
  }
  return 2;
}
