#include "tipsense/dataset.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>

#include "tipsense/renderer.hpp"
#include "tipsense/rng.hpp"

namespace tipsense {

namespace fs = std::filesystem;

void RendererDefaults::validate(const SensorGeometry& g) const {
  if (!(depth_mm > 0.0 && depth_mm < g.r_mm)) {
    throw std::invalid_argument("renderer: depth_mm must lie in (0, r_mm)");
  }
}

void add_gaussian_noise(TactileImage& image, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) {
    throw std::invalid_argument("noise sigma must be >= 0");
  }
  if (sigma == 0.0) {
    return;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (std::uint8_t& px : image.pixels()) {
    const long value = std::lround(px + noise(rng));
    px = static_cast<std::uint8_t>(std::clamp(value, 0L, 255L));
  }
}

DatasetManifest generate_protocol_dataset(const fs::path& out_dir, const SensorGeometry& g,
                                          const CameraIntrinsics& k, double noise_sigma,
                                          std::uint64_t seed, const RendererDefaults& renderer) {
  g.validate();
  k.validate();
  renderer.validate(g);
  if (noise_sigma < 0.0) {
    throw std::invalid_argument("noise sigma must be >= 0");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw IoError(out_dir, "cannot create output directory");
  }

  DatasetManifest manifest;
  manifest.noise_sigma = noise_sigma;
  manifest.seed = seed;
  manifest.depth_mm = renderer.depth_mm;

  // Image 0 is the reference; protocol frames follow in manifest order.
  std::uint64_t image_index = 0;
  const std::string reference_name = "reference.pgm";
  {
    TactileImage ref = render_reference(g, k);
    add_gaussian_noise(ref, noise_sigma, derive_seed(seed, image_index++));
    write_pgm(out_dir / reference_name, ref);
  }

  const auto poses = protocol_poses();
  for (Shape shape : kAllShapes) {
    for (std::size_t i = 0; i < poses.size(); ++i) {
      const SurfacePoint truth = pose_to_contact_point(poses[i], g);
      TactileImage frame = render_contact(make_indenter(shape, truth, renderer.depth_mm), g, k);
      add_gaussian_noise(frame, noise_sigma, derive_seed(seed, image_index++));
      const std::string name = fmt::format("{}_{}.pgm", to_string(shape), i);
      write_pgm(out_dir / name, frame);
      manifest.entries.push_back({to_string(shape), poses[i], reference_name, name, truth.mm});
    }
  }

  const fs::path manifest_path = out_dir / kManifestFileName;
  std::ofstream out(manifest_path);
  if (!out) {
    throw IoError(manifest_path, "cannot open for writing");
  }
  out << manifest_to_json(manifest).dump(2) << '\n';
  if (!out) {
    throw IoError(manifest_path, "write failed");
  }
  return manifest;
}

nlohmann::json manifest_to_json(const DatasetManifest& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (const ManifestEntry& e : m.entries) {
    entries.push_back({{"object", e.object},
                       {"pose_kind", to_string(e.pose.kind)},
                       {"pose_value", e.pose.value},
                       {"reference", e.reference},
                       {"frame", e.frame},
                       {"truth_mm", {e.truth_mm.x(), e.truth_mm.y(), e.truth_mm.z()}}});
  }
  return {{"entries", entries},
          {"noise_sigma", m.noise_sigma},
          {"seed", m.seed},
          {"depth_mm", m.depth_mm}};
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  DatasetManifest m;
  m.noise_sigma = j.value("noise_sigma", 0.0);
  m.seed = j.value("seed", std::uint64_t{0});
  m.depth_mm = j.value("depth_mm", 0.0);
  for (const auto& e : j.at("entries")) {
    ManifestEntry entry;
    entry.object = e.at("object").get<std::string>();
    entry.pose = {pose_kind_from_string(e.at("pose_kind").get<std::string>()),
                  e.at("pose_value").get<double>()};
    entry.reference = e.at("reference").get<std::string>();
    entry.frame = e.at("frame").get<std::string>();
    const auto& t = e.at("truth_mm");
    if (!t.is_array() || t.size() != 3) {
      throw std::invalid_argument("manifest entry truth_mm must be an array of 3 numbers");
    }
    entry.truth_mm = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
    m.entries.push_back(std::move(entry));
  }
  return m;
}

DatasetManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(path, "cannot open manifest");
  }
  try {
    return manifest_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path, std::string("invalid manifest: ") + e.what());
  }
}

}  // namespace tipsense
