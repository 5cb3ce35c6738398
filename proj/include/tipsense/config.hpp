#pragma once

// Session configuration, stored as JSON with units in the key names:
//
//   {
//     "geometry":   {"r_mm": 10, "d_mm": 30},
//     "intrinsics": {"alpha_px": 300, "cx_px": 960, "cy_px": 540,
//                    "width_px": 1920, "height_px": 1080},
//     "detection":  {"sigma_px": 2, "threshold": 25, "min_area_px": 20},
//     "renderer":   {"depth_mm": 1.5},
//     "paths":      {"out_dir": "out"}
//   }
//
// Missing keys take the defaults above; unknown keys are rejected.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "tipsense/dataset.hpp"
#include "tipsense/geometry.hpp"
#include "tipsense/imaging.hpp"

namespace tipsense {

struct PathsConfig {
  std::string out_dir = "out";
  friend bool operator==(const PathsConfig&, const PathsConfig&) = default;
};

struct SessionConfig {
  SensorGeometry geometry;
  CameraIntrinsics intrinsics;
  DetectionParams detection;
  RendererDefaults renderer;
  PathsConfig paths;

  // Runs every constituent validate(); throws std::invalid_argument.
  void validate() const;
  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SessionConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SessionConfig& c);

SessionConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const SessionConfig& c);

}  // namespace tipsense
