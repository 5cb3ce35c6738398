#include "tipsense/config.hpp"

#include <fstream>
#include <set>

namespace tipsense {

void SessionConfig::validate() const {
  geometry.validate();
  intrinsics.validate();
  detection.validate();
  renderer.validate(geometry);
}

namespace {

using nlohmann::json;

const json& section(const json& root, const char* name, std::set<std::string> allowed) {
  static const json empty = json::object();
  if (!root.contains(name)) {
    return empty;
  }
  const json& s = root.at(name);
  if (!s.is_object()) {
    throw ConfigError(std::string("config section '") + name + "' must be an object");
  }
  for (const auto& item : s.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(std::string("unknown config key '") + name + "." + item.key() + "'");
    }
  }
  return s;
}

template <typename T>
void read(const json& s, const char* key, T& out) {
  if (!s.contains(key)) {
    return;
  }
  try {
    out = s.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

SessionConfig config_from_json(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  static const std::set<std::string> sections = {"geometry", "intrinsics", "detection", "renderer",
                                                 "paths"};
  for (const auto& item : j.items()) {
    if (!sections.count(item.key())) {
      throw ConfigError("unknown config section '" + item.key() + "'");
    }
  }
  SessionConfig c;
  const json& geo = section(j, "geometry", {"r_mm", "d_mm"});
  read(geo, "r_mm", c.geometry.r_mm);
  read(geo, "d_mm", c.geometry.d_mm);

  const json& in = section(j, "intrinsics", {"alpha_px", "cx_px", "cy_px", "width_px", "height_px"});
  read(in, "alpha_px", c.intrinsics.alpha_px);
  read(in, "cx_px", c.intrinsics.cx_px);
  read(in, "cy_px", c.intrinsics.cy_px);
  read(in, "width_px", c.intrinsics.width_px);
  read(in, "height_px", c.intrinsics.height_px);

  const json& det = section(j, "detection", {"sigma_px", "threshold", "min_area_px"});
  read(det, "sigma_px", c.detection.sigma_px);
  read(det, "threshold", c.detection.threshold);
  read(det, "min_area_px", c.detection.min_area_px);

  const json& ren = section(j, "renderer", {"depth_mm"});
  read(ren, "depth_mm", c.renderer.depth_mm);

  const json& paths = section(j, "paths", {"out_dir"});
  read(paths, "out_dir", c.paths.out_dir);

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return c;
}

json config_to_json(const SessionConfig& c) {
  return {
      {"geometry", {{"r_mm", c.geometry.r_mm}, {"d_mm", c.geometry.d_mm}}},
      {"intrinsics",
       {{"alpha_px", c.intrinsics.alpha_px},
        {"cx_px", c.intrinsics.cx_px},
        {"cy_px", c.intrinsics.cy_px},
        {"width_px", c.intrinsics.width_px},
        {"height_px", c.intrinsics.height_px}}},
      {"detection",
       {{"sigma_px", c.detection.sigma_px},
        {"threshold", c.detection.threshold},
        {"min_area_px", c.detection.min_area_px}}},
      {"renderer", {{"depth_mm", c.renderer.depth_mm}}},
      {"paths", {{"out_dir", c.paths.out_dir}}},
  };
}

SessionConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config " + path.string());
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void save_config(const std::filesystem::path& path, const SessionConfig& c) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write config " + path.string());
  }
  out << config_to_json(c).dump(2) << '\n';
}

}  // namespace tipsense
