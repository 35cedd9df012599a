// Command-line front end: fdrelay <command> [options]

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "fdrelay/cli/config.hpp"
#include "fdrelay/cli/experiment.hpp"
#include "fdrelay/error.hpp"

namespace cli = fdrelay::cli;

namespace {

std::string flag_for(std::string_view key) {
  std::string flag = "--";
  for (char c : key) flag += c == '_' ? '-' : c;
  return flag;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-duplex AF relay: outage, SER and allocation optimization"};
  app.require_subcommand(1);

  std::string config_path;
  std::string mode = "both";
  std::string output;
  unsigned threads = 0;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--output", output, "CSV destination (default stdout)");
  app.add_option("--mode", mode, "analytic, mc or both")
      ->check(CLI::IsMember({"analytic", "mc", "both"}));
  app.add_option("--threads", threads, "worker threads (0: all cores)");

  // One flag per config key; applied after the config file so flags win.
  std::map<std::string, std::string> overrides;
  for (auto key : cli::config_keys()) {
    app.add_option(flag_for(key), overrides[std::string(key)],
                   "overrides config key " + std::string(key));
  }

  int figure = 0;
  for (auto name : {"outage", "ser", "optimize-location", "optimize-power", "optimize-joint",
                    "figure", "validate"}) {
    auto* sub = app.add_subcommand(name)->fallthrough();
    if (std::string_view(name) == "figure") {
      sub->add_option("number", figure, "figure number, 2-9")->required();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  cli::ExperimentSpec spec;
  spec.command = *cli::parse_command(app.get_subcommands().front()->get_name());
  spec.figure = figure;
  spec.threads = threads;
  spec.output_path = output;
  spec.mode = mode == "analytic" ? cli::RunMode::analytic
              : mode == "mc"     ? cli::RunMode::mc
                                 : cli::RunMode::both;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw fdrelay::ConfigError(config_path + ": cannot open");
      cli::load_config(spec, in, config_path);
    }
    for (auto key : cli::config_keys()) {
      const auto& value = overrides[std::string(key)];
      if (!value.empty()) cli::apply_setting(spec, key, value, flag_for(key));
    }
  } catch (const fdrelay::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitUsage;
  }
  return cli::run(spec, std::cout, std::cerr);
}
