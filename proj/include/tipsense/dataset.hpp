#pragma once

// Synthetic contact-localisation protocol: every object tapped at four tip
// rotations and four side translations, rendered against one shared
// reference frame.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tipsense/geometry.hpp"
#include "tipsense/image.hpp"

namespace tipsense {

struct RendererDefaults {
  double depth_mm = 1.5;

  void validate(const SensorGeometry& g) const;
  friend bool operator==(const RendererDefaults&, const RendererDefaults&) = default;
};

struct ManifestEntry {
  std::string object;
  ContactPose pose;
  std::string reference;  // relative to the manifest directory
  std::string frame;
  Eigen::Vector3d truth_mm = Eigen::Vector3d::Zero();
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  double depth_mm = 0.0;
};

inline constexpr const char* kManifestFileName = "manifest.json";

// Adds rounded zero-mean Gaussian noise in place, clamped to [0, 255].
void add_gaussian_noise(TactileImage& image, double sigma, std::uint64_t seed);

// Writes reference.pgm, one PGM per (object, pose) and manifest.json into
// out_dir (created if needed). Throws IoError naming the failing path.
DatasetManifest generate_protocol_dataset(const std::filesystem::path& out_dir,
                                          const SensorGeometry& g, const CameraIntrinsics& k,
                                          double noise_sigma, std::uint64_t seed,
                                          const RendererDefaults& renderer = {});

nlohmann::json manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace tipsense
