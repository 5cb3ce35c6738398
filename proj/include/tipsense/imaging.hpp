#pragma once

// Contact detection on tactile frames: reference differencing, Gaussian
// smoothing, thresholded 8-connected blobs, back-projection of the winning
// blob, and error statistics.

#include <optional>
#include <string>
#include <vector>

#include "tipsense/geometry.hpp"
#include "tipsense/image.hpp"

namespace tipsense {

struct ContactBlob {
  PixelCoord centroid;  // intensity-weighted
  int area_px = 0;
  double peak = 0.0;
  double total_mass = 0.0;
};

struct ContactEstimate {
  PixelCoord pixel;
  SurfacePoint point;
};

struct DetectionParams {
  double sigma_px = 2.0;
  double threshold = 25.0;
  int min_area_px = 20;

  void validate() const;
  friend bool operator==(const DetectionParams&, const DetectionParams&) = default;
};

// Per-pixel |frame - ref|. Throws std::invalid_argument on shape mismatch.
DiffImage subtract_reference(const TactileImage& ref, const TactileImage& frame);

// Separable Gaussian, truncated at ceil(3 sigma), clamped edges. sigma == 0
// returns the input unchanged.
DiffImage smooth(const DiffImage& d, double sigma_px);

// Normalised 1D taps for smooth(); exposed for tests and the benchmark.
std::vector<double> gaussian_kernel(double sigma_px);

// Pixels strictly above `threshold`, grouped by 8-connectivity, components
// smaller than `min_area_px` dropped, sorted by total mass (heaviest first).
std::vector<ContactBlob> detect_blobs(const DiffImage& d, double threshold, int min_area_px);

// Throws NoIntersection when the centroid does not back-project.
ContactEstimate localize_contact(const ContactBlob& blob, const CameraIntrinsics& k,
                                 const SensorGeometry& g);

double localization_error(const ContactEstimate& e, const SurfacePoint& truth);

// Full pipeline; returns nullopt when no blob survives detection.
std::optional<ContactEstimate> locate_contact(const TactileImage& ref, const TactileImage& frame,
                                              const DetectionParams& params,
                                              const CameraIntrinsics& k, const SensorGeometry& g);

// Reference implementations of the row-parallel kernels.
namespace serial {
DiffImage subtract_reference(const TactileImage& ref, const TactileImage& frame);
DiffImage smooth(const DiffImage& d, double sigma_px);
}  // namespace serial

struct ErrorRecord {
  std::string object;
  ContactPose pose;
  double error_mm = 0.0;
};

struct GroupStat {
  std::string label;
  int count = 0;
  double mean_mm = 0.0;
  double std_mm = 0.0;  // sample standard deviation; 0 for a single record
};

struct ErrorTables {
  std::vector<GroupStat> by_pose;
  std::vector<GroupStat> by_object;
};

// Groups by pose and by object. Known poses and objects come out in the
// protocol order; anything else follows in lexicographic order. Throws
// std::invalid_argument for an empty record list.
ErrorTables aggregate_errors(const std::vector<ErrorRecord>& records);

std::string pose_label(const ContactPose& pose);

// Published hardware measurements (mean, std in mm) kept for side-by-side
// reporting. These are not targets for the synthetic pipeline.
struct HardwareReference {
  const char* label;
  double mean_mm;
  double std_mm;
};

inline constexpr HardwareReference kHardwareErrorsByPose[] = {
    {"rotation 0", 4.71, 0.75},     {"rotation pi/6", 2.01, 0.90},
    {"rotation pi/4", 1.04, 0.46},  {"rotation pi/3", 6.96, 4.82},
    {"translation 0", 7.87, 5.08},  {"translation 5", 8.03, 1.92},
    {"translation 10", 7.55, 5.00}, {"translation 15", 4.86, 8.41},
};

inline constexpr HardwareReference kHardwareErrorsByObject[] = {
    {"cone", 3.63, 3.26},     {"sphere", 6.79, 5.38}, {"irregular", 5.61, 4.08},
    {"cylinder", 4.57, 4.30}, {"edge", 7.47, 6.29},   {"tube", 3.33, 1.90},
    {"slab", 6.27, 8.17},
};

}  // namespace tipsense
