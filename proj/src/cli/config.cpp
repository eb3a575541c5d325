#include "cli/config.hpp"

#include <fstream>
#include <sstream>

namespace effmap::cli {
namespace {

Json optical() { return Json{{"wavelength_m", 1064e-9}, {"alpha", 1.0}}; }

Json membrane(int m, int n, double w0) {
  return Json{{"Lx_m", 1.5e-3}, {"Ly_m", 3.5e-3}, {"m", m}, {"n", n}, {"w0_m", w0}, {"z_d_m", 0.3}};
}

Json membrane_grid() {
  return Json{{"device_n", 256}, {"far_nx", 1024}, {"far_ny", 256}, {"lever_threshold", 0.1}};
}

Json dipole() {
  return Json{{"na", 1.0},      {"alpha0", 1.0}, {"alpha_dip", 1.0}, {"wavelength_m", 1064e-9},
              {"axis", "y0"},   {"n_theta", 200}, {"n_phi", 400},   {"information_n", 400}};
}

bool compatible(const Json& def, const Json& v) {
  if (def.is_number()) return v.is_number() && (!def.is_number_integer() || v.is_number_integer());
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_string()) return v.is_string();
  if (def.is_array()) return v.is_array();
  if (def.is_object()) return v.is_object();
  return true;
}

void merge_into(Json& base, const Json& user, const std::string& path) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
    Json& slot = base[it.key()];
    if (!compatible(slot, it.value())) {
      throw ConfigError("config key '" + key + "' expects " + std::string(slot.type_name()) + ", got " +
                        it.value().type_name());
    }
    if (slot.is_object()) {
      merge_into(slot, it.value(), key);
    } else if (slot.is_number_float()) {
      slot = it.value().get<double>();
    } else {
      slot = it.value();
    }
  }
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"membrane-dde",   "membrane-block-scan", "membrane-sweep",
                                                 "dipole-irp",     "dipole-block-scan",   "phase-contrast",
                                                 "fisher-check"};
  return names;
}

Json default_config(const std::string& scenario) {
  Json c;
  c["scenario"] = scenario;
  if (scenario == "membrane-dde") {
    c["optical"] = optical();
    c["membrane"] = membrane(2, 1, 100e-6);
    c["model"] = "numeric";
    c["grid"] = membrane_grid();
    c["weighting"] = Json{{"kind", "qpd"}, {"block_over_wd", 0.0}, {"linear_scale_over_wd", 1.0}};
    c["wire_scan"] = Json{{"enabled", false}, {"width_m", 180e-6}, {"step_m", 180e-6}, {"span_over_wd", 3.0}};
  } else if (scenario == "membrane-block-scan") {
    c["optical"] = optical();
    c["membrane"] = membrane(2, 1, 20e-6);
    c["model"] = "optical-lever";
    c["grid"] = membrane_grid();
    c["scan"] = Json{{"points", 201}, {"B_max_over_wd", 3.0}};
  } else if (scenario == "membrane-sweep") {
    c["optical"] = optical();
    c["membrane"] = membrane(2, 1, 100e-6);
    c["model"] = "numeric";
    c["grid"] = membrane_grid();
    c["modes"] = Json::array({Json::array({2, 1}), Json::array({4, 1}), Json::array({6, 1}), Json::array({8, 1}),
                              Json::array({10, 1})});
    c["blocked"] = true;
  } else if (scenario == "dipole-irp") {
    c["dipole"] = dipole();
    c["output_grid"] = Json{{"n_theta", 90}, {"n_phi", 180}};
  } else if (scenario == "dipole-block-scan") {
    c["dipole"] = dipole();
    c["block"] = Json{{"shape", "strip"}, {"points", 201}};
  } else if (scenario == "phase-contrast") {
    c["optical"] = optical();
    c["membrane"] = membrane(14, 1, 200e-6);
    c["scheme"] = "array";
    c["array"] = Json{{"gap", 0.0}, {"scan_max_gap", 0.6}, {"cells_per_pitch", 100}, {"ny", 256}};
    c["mask"] = Json{{"threshold", 0.29}, {"n", 1024}, {"sweep_lo", 0.0}, {"sweep_hi", 0.6}, {"sweep_points", 121},
                     {"emit", "pgm"}};
    c["grating_threshold"] = 2.0;
  } else if (scenario == "fisher-check") {
    c["optical"] = optical();
    c["membrane"] = membrane(2, 1, 100e-6);
    c["device_n"] = 256;
    c["tau_s"] = 1.0;
  } else {
    throw ConfigError("unknown scenario '" + scenario + "'; see list-scenarios");
  }
  return c;
}

Json merge_config(const Json& user) {
  if (!user.is_object()) throw ConfigError("config must be a JSON object");
  if (!user.contains("scenario") || !user["scenario"].is_string()) {
    throw ConfigError("config needs a string 'scenario' key");
  }
  Json merged = default_config(user["scenario"].get<std::string>());
  merge_into(merged, user, "");
  return merged;
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  if (path == "scenario") throw ConfigError("the scenario cannot be overridden");
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  Json patch = value;
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (it->empty()) throw ConfigError("override path '" + path + "' has an empty component");
    patch = Json{{*it, patch}};
  }
  merge_into(config, patch, "");
}

Json load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  Json user = Json::parse(in, nullptr, false);
  if (user.is_discarded()) throw ConfigError("config '" + path + "' is not valid JSON");
  Json merged = merge_config(user);
  for (const std::string& o : overrides) apply_override(merged, o);
  return merged;
}

}  // namespace effmap::cli
