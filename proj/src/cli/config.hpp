#pragma once
// Scenario configuration: JSON documents merged onto per-scenario defaults.
// Every key must already exist in the defaults with a compatible type.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace effmap::cli {

using Json = nlohmann::ordered_json;

/// Bad config file, unknown key, wrong type or unparsable override.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<std::string>& scenario_names();
/// Full default document for a scenario, including the "scenario" key.
Json default_config(const std::string& scenario);

/// Merges `user` onto the scenario defaults named by user["scenario"].
Json merge_config(const Json& user);
/// Applies one `dotted.path=value` override. The value is read as JSON when it
/// parses, otherwise as a string.
void apply_override(Json& config, const std::string& assignment);

Json load_config(const std::string& path, const std::vector<std::string>& overrides);

}  // namespace effmap::cli
