#pragma once
// Named scenario runners. Each reads a merged config, writes its CSV tables and
// summary.json into the output directory and returns the file names written.

#include <filesystem>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace effmap::cli {

struct ScenarioInfo {
  std::string name;
  std::string description;
};
const std::vector<ScenarioInfo>& scenario_catalogue();

std::vector<std::string> run_scenario(const Json& config, const std::filesystem::path& out_dir,
                                      const std::string& version);

}  // namespace effmap::cli
