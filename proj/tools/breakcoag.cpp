// breakcoag: run or verify a coagulation/collisional-breakage scenario.
//
//   breakcoag run config.json --out results/ [--override key=value ...]
//   breakcoag verify config.json [--out dir]
//
// Exit status: 0 pass, 2 configuration error, 3 integration failure,
// 4 assertion failure, 1 anything else.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "breakcoag/errors.hpp"
#include "breakcoag/scenario.hpp"

namespace {

int execute(const std::string& config_path, const std::string& out, const std::vector<std::string>& overrides,
            bool verify_only) {
  using namespace breakcoag;
  try {
    const ScenarioConfig cfg = parse_config_file(config_path, overrides);
    const RunOutcome outcome = run_scenario(cfg, out, verify_only);
    for (const auto& note : outcome.notes) std::cout << note << '\n';
    for (const auto& [name, passed] : outcome.assertions) {
      std::cout << (passed ? "PASS " : "FAIL ") << name << '\n';
    }
    (outcome.exit_code == exit_ok ? std::cout : std::cerr) << outcome.message << " (config " << cfg.hash << ")\n";
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return exit_config;
  } catch (const IntegrationError& e) {
    std::cerr << "integration failure: " << e.what() << '\n';
    return exit_integration;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coagulation with collision-induced breakage: hypothesis checks and simulation"};
  app.require_subcommand(1);

  std::string config;
  std::string out = "results";
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "Run the experiments listed in a scenario config");
  run->add_option("config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory")->capture_default_str();
  run->add_option("--override", overrides, "dotted.key=value applied to the config");

  auto* verify = app.add_subcommand("verify", "Write the hypothesis report only");
  verify->add_option("config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  verify->add_option("--out", out, "Output directory")->capture_default_str();
  verify->add_option("--override", overrides, "dotted.key=value applied to the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : breakcoag::exit_config;
  }
  return execute(config, out, overrides, verify->parsed());
}
