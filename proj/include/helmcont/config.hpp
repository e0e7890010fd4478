#pragma once

// Run configuration: one JSON document with fixed sections, defaults filled
// in, flag overrides applied as dotted paths, validated with the offending
// key named in every error. The fully-resolved document is echoed to the
// manifest so any run can be reproduced from its output directory alone.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "helmcont/continuation.hpp"
#include "helmcont/core.hpp"
#include "helmcont/experiments.hpp"
#include "helmcont/util.hpp"

namespace helmcont {

using json = nlohmann::json;

inline json default_config() {
  return json{
      {"geometry",
       {{"kind", "strip"},
        {"L", 2.0 * M_PI},
        {"n_tangential", 64},
        {"n_depth", 33},
        {"sponge_width", 0.1},
        {"R", 2.0},
        {"n_angular", 128},
        {"n_radial", 2049}}},
      {"coefficients", {{"preset", "laplacian"}, {"c", 0.0}, {"table_path", ""}}},
      {"cutoff", {{"k", 10.0}, {"k_values", json::array()}, {"E", 0.0}, {"eps", 0.19}}},
      {"experiment",
       {{"solution_id", "low_band_b4"},
        {"delta", 1e-3},
        {"seed", 20260816},
        {"theta", 0.1},
        {"policy", "low_only"}}},
      {"svd", {{"m_max", 0}, {"theta_plateau", 0.1}}},
      {"demo", {{"mu_values", {0.5, 2.0}}}},
      {"norms", {{"field_path", ""}}},
      {"output", {{"dir", "out"}, {"svg", true}}},
  };
}

namespace detail {

inline void merge_section(json& base, const json& user, const std::string& prefix) {
  if (!user.is_object())
    throw ConfigError(prefix.empty() ? "config" : prefix,
                      "expected an object at " + (prefix.empty() ? "top level" : prefix));
  for (const auto& [key, value] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) throw ConfigError(path, "unknown config key: " + path);
    if (base[key].is_object())
      merge_section(base[key], value, path);
    else
      base[key] = value;
  }
}

inline json* walk_path(json& root, const std::string& dotted) {
  json* node = &root;
  std::size_t pos = 0;
  while (pos <= dotted.size()) {
    const std::size_t dot = dotted.find('.', pos);
    const std::string part =
        dotted.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty() || !node->is_object() || !node->contains(part)) return nullptr;
    node = &(*node)[part];
    if (dot == std::string::npos) return node;
    pos = dot + 1;
  }
  return nullptr;
}

}  // namespace detail

/// Merge a user config document over the defaults; unknown keys are errors.
inline json merge_config(const json& user) {
  json cfg = default_config();
  detail::merge_section(cfg, user, "");
  return cfg;
}

inline json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open config file: " + path);
  json user;
  try {
    in >> user;
  } catch (const json::exception& e) {
    throw ConfigError("config", "config parse failure in " + path + ": " + e.what());
  }
  return merge_config(user);
}

/// Apply one --set KEY=VALUE override. The value is parsed as a JSON literal
/// when possible and taken as a string otherwise.
inline void apply_override(json& cfg, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("set", "override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json* node = detail::walk_path(cfg, key);
  if (!node) throw ConfigError(key, "unknown config key: " + key);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  if (node->is_object()) throw ConfigError(key, "cannot assign to a section: " + key);
  *node = value;
}

// ---------------------------------------------------------------------------
// resolution

struct RunConfig {
  json resolved;
  GeometryKind kind = GeometryKind::strip;
  StripGeometry strip;
  AnnulusGeometry annulus;
  CoefficientModel model;
  double k = 0.0;
  std::vector<double> k_values; // always nonempty after resolution
  double eps = 0.19;
  SweepConfig experiment;
  int m_max = 0; // 0 requests the default 2kR
  double theta_plateau = 0.1;
  std::vector<double> mu_values;
  std::string field_path;
  std::string out_dir;
  bool svg = true;
};

namespace detail {

inline double want_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, "expected a number at " + key);
  return j.get<double>();
}

inline int want_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError(key, "expected an integer at " + key);
  return j.get<int>();
}

inline std::string want_string(const json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError(key, "expected a string at " + key);
  return j.get<std::string>();
}

inline bool want_bool(const json& j, const std::string& key) {
  if (!j.is_boolean()) throw ConfigError(key, "expected a boolean at " + key);
  return j.get<bool>();
}

}  // namespace detail

inline RunConfig resolve_config(const json& cfg) {
  RunConfig run;
  run.resolved = cfg;

  const json& g = cfg.at("geometry");
  const std::string kind = detail::want_string(g.at("kind"), "geometry.kind");
  if (kind == "strip")
    run.kind = GeometryKind::strip;
  else if (kind == "annulus")
    run.kind = GeometryKind::annulus;
  else
    throw ConfigError("geometry.kind", "geometry.kind must be strip or annulus");

  try {
    run.strip = build_strip_geometry(detail::want_number(g.at("L"), "geometry.L"),
                                     detail::want_int(g.at("n_tangential"),
                                                      "geometry.n_tangential"),
                                     detail::want_int(g.at("n_depth"), "geometry.n_depth"),
                                     detail::want_number(g.at("sponge_width"),
                                                         "geometry.sponge_width"));
  } catch (const std::invalid_argument& e) {
    if (run.kind == GeometryKind::strip) throw ConfigError("geometry", e.what());
    run.strip = StripGeometry{};
  }
  try {
    run.annulus = build_annulus_geometry(
        detail::want_number(g.at("R"), "geometry.R"),
        detail::want_int(g.at("n_angular"), "geometry.n_angular"),
        detail::want_int(g.at("n_radial"), "geometry.n_radial"));
  } catch (const std::invalid_argument& e) {
    if (run.kind == GeometryKind::annulus) throw ConfigError("geometry", e.what());
    run.annulus = AnnulusGeometry{};
  }

  const json& co = cfg.at("coefficients");
  const std::string preset = detail::want_string(co.at("preset"), "coefficients.preset");
  const double c0 = detail::want_number(co.at("c"), "coefficients.c");
  if (preset == "laplacian") {
    run.model = run.kind == GeometryKind::strip ? laplacian_strip()
                                                : laplacian_annulus(c0);
    if (run.kind == GeometryKind::strip && c0 != 0.0)
      throw ConfigError("coefficients.c",
                        "the strip propagator is exact only for c = 0");
  } else if (preset == "radial_table") {
    if (run.kind != GeometryKind::annulus)
      throw ConfigError("coefficients.preset",
                        "radial_table coefficients need geometry.kind = annulus");
    const std::string path =
        detail::want_string(co.at("table_path"), "coefficients.table_path");
    if (path.empty())
      throw ConfigError("coefficients.table_path",
                        "radial_table preset needs coefficients.table_path");
    run.model = radial_table_annulus(load_radial_table(path), run.annulus.R);
  } else {
    throw ConfigError("coefficients.preset",
                      "coefficients.preset must be laplacian or radial_table");
  }

  const json& cu = cfg.at("cutoff");
  run.k = detail::want_number(cu.at("k"), "cutoff.k");
  if (!(run.k > 0.0)) throw ConfigError("cutoff.k", "cutoff.k must be positive");
  run.eps = detail::want_number(cu.at("eps"), "cutoff.eps");
  if (!(run.eps > 0.0) || !(run.eps < 1.0))
    throw ConfigError("cutoff.eps", "cutoff.eps must lie in (0,1)");
  const double E_flag = detail::want_number(cu.at("E"), "cutoff.E");
  if (E_flag < 0.0) throw ConfigError("cutoff.E", "cutoff.E must be nonnegative");
  if (E_flag > 0.0) run.model.E = E_flag;
  if (!cu.at("k_values").is_array())
    throw ConfigError("cutoff.k_values", "expected an array at cutoff.k_values");
  for (const json& v : cu.at("k_values")) {
    const double kv = detail::want_number(v, "cutoff.k_values");
    if (!(kv > 0.0))
      throw ConfigError("cutoff.k_values", "cutoff.k_values entries must be positive");
    run.k_values.push_back(kv);
  }
  if (run.k_values.empty()) run.k_values.push_back(run.k);

  const json& ex = cfg.at("experiment");
  run.experiment.solution_id =
      detail::want_string(ex.at("solution_id"), "experiment.solution_id");
  run.experiment.k_values = run.k_values;
  run.experiment.delta = detail::want_number(ex.at("delta"), "experiment.delta");
  if (!(run.experiment.delta >= 0.0))
    throw ConfigError("experiment.delta", "experiment.delta must be nonnegative");
  const json& seed = ex.at("seed");
  if (!seed.is_number_integer() || seed.get<std::int64_t>() < 0)
    throw ConfigError("experiment.seed", "experiment.seed must be a nonnegative integer");
  run.experiment.seed = seed.get<std::uint64_t>();
  run.experiment.theta = detail::want_number(ex.at("theta"), "experiment.theta");
  if (!(run.experiment.theta > 0.0))
    throw ConfigError("experiment.theta", "experiment.theta must be positive");
  const std::string policy = detail::want_string(ex.at("policy"), "experiment.policy");
  if (policy == "low_only")
    run.experiment.policy = ModePolicy::low_only;
  else if (policy == "all")
    run.experiment.policy = ModePolicy::all;
  else
    throw ConfigError("experiment.policy", "experiment.policy must be low_only or all");
  run.experiment.eps = run.eps;

  const json& sv = cfg.at("svd");
  run.m_max = detail::want_int(sv.at("m_max"), "svd.m_max");
  if (run.m_max < 0) throw ConfigError("svd.m_max", "svd.m_max must be nonnegative");
  run.theta_plateau =
      detail::want_number(sv.at("theta_plateau"), "svd.theta_plateau");
  if (!(run.theta_plateau > 0.0) || !(run.theta_plateau < 1.0))
    throw ConfigError("svd.theta_plateau", "svd.theta_plateau must lie in (0,1)");

  if (!cfg.at("demo").at("mu_values").is_array())
    throw ConfigError("demo.mu_values", "expected an array at demo.mu_values");
  for (const json& v : cfg.at("demo").at("mu_values")) {
    const double mu = detail::want_number(v, "demo.mu_values");
    if (!(mu >= 0.0))
      throw ConfigError("demo.mu_values", "demo.mu_values entries must be nonnegative");
    run.mu_values.push_back(mu);
  }

  run.field_path = detail::want_string(cfg.at("norms").at("field_path"),
                                       "norms.field_path");
  run.out_dir = detail::want_string(cfg.at("output").at("dir"), "output.dir");
  if (run.out_dir.empty()) throw ConfigError("output.dir", "output.dir must be nonempty");
  run.svg = detail::want_bool(cfg.at("output").at("svg"), "output.svg");
  return run;
}

/// Write <out_dir>/manifest.json echoing the fully-resolved config.
inline void write_manifest(const std::string& out_dir, const std::string& command,
                           const json& resolved) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const fs::path path = fs::path(out_dir) / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericalError("io", "cannot write manifest: " + path.string());
  json doc{{"command", command}, {"config", resolved}};
  out << doc.dump(2) << "\n";
}

}  // namespace helmcont
