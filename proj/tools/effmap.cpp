// effmap command-line tool: run a scenario from a JSON config, list the
// scenarios, print the version.
//
// Exit codes: 0 success, 1 I/O or unexpected failure, 2 config error,
// 3 numerical error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/config.hpp"
#include "cli/scenarios.hpp"
#include "effmap/errors.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

int run(const std::string& config_path, const std::vector<std::string>& overrides, const std::string& out_dir) {
  using namespace effmap;
  try {
    const cli::Json config = cli::load_config(config_path, overrides);
    for (const std::string& f : cli::run_scenario(config, out_dir, EFFMAP_VERSION)) std::cout << f << '\n';
    return kOk;
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const PreconditionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const UnsupportedModeError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const LimitInvalidError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const cli::Json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detection-efficiency maps for optical position measurements"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  CLI::App* run_cmd = app.add_subcommand("run", "run a scenario");
  run_cmd->add_option("--config", config_path, "JSON scenario config")->required();
  run_cmd->add_option("--set", overrides, "override, dotted.key=value (repeatable)");
  run_cmd->add_option("--out", out_dir, "output directory");

  CLI::App* list_cmd = app.add_subcommand("list-scenarios", "list scenario names");
  CLI::App* version_cmd = app.add_subcommand("version", "print the tool version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (*run_cmd) return run(config_path, overrides, out_dir);
  if (*list_cmd) {
    for (const auto& s : effmap::cli::scenario_catalogue()) std::cout << s.name << "\t" << s.description << '\n';
    return kOk;
  }
  if (*version_cmd) {
    std::cout << "effmap " << EFFMAP_VERSION << '\n';
    return kOk;
  }
  return kFailure;
}
