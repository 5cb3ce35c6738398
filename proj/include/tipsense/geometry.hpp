#pragma once

// Projective model of the finger-shaped membrane: a hemispherical tip of
// radius r centred at (0, 0, d) on top of an open cylinder of the same radius
// spanning 0 <= z <= d. The camera sits at the origin looking along +z with
// identity extrinsics.
//
// Units: lengths in millimetres, image coordinates in pixels, angles in
// radians.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace tipsense {

struct SensorGeometry {
  double r_mm = 10.0;  // membrane radius
  double d_mm = 30.0;  // base to hemisphere centre

  // Throws std::invalid_argument unless r > 0 and d >= 0.
  void validate() const;
  friend bool operator==(const SensorGeometry&, const SensorGeometry&) = default;
};

// Square-pixel pinhole intrinsics. alpha folds focal length and pixel ratio.
struct CameraIntrinsics {
  double alpha_px = 300.0;
  double cx_px = 960.0;
  double cy_px = 540.0;
  int width_px = 1920;
  int height_px = 1080;

  void validate() const;
  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

// Raw frame coordinates, origin top-left. Pixel (i, j) has its centre at
// u = i, v = j.
struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

enum class Region { Tip, Side, Off };

std::string to_string(Region region);

struct SurfacePoint {
  Eigen::Vector3d mm = Eigen::Vector3d::Zero();
  Region region = Region::Off;
};

// Raised by back_project when the pixel's viewing ray does not meet the
// membrane inside the camera frame.
class NoIntersection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tolerance used when validating that a point lies on the membrane.
inline constexpr double kSurfaceTolMm = 1e-6;

Region classify_surface_point(const Eigen::Vector3d& p, const SensorGeometry& g, double tol_mm);

// Throws std::invalid_argument for z <= 0.
PixelCoord project(const Eigen::Vector3d& p, const CameraIntrinsics& k);

// Intersects the viewing ray of `px` with the membrane. Throws NoIntersection
// for non-finite pixels, pixels outside [0, width] x [0, height], or rays that
// miss the surface.
SurfacePoint back_project(PixelCoord px, const CameraIntrinsics& k, const SensorGeometry& g);

// Non-throwing variant for per-pixel loops.
std::optional<SurfacePoint> try_back_project(PixelCoord px, const CameraIntrinsics& k,
                                             const SensorGeometry& g) noexcept;

// Image-space radius r*alpha/d of the tip/side seam. Throws for d == 0.
double discontinuity_circle_radius_px(const CameraIntrinsics& k, const SensorGeometry& g);

// Outward unit normal. Throws std::invalid_argument for points off the membrane.
Eigen::Vector3d surface_normal(const SurfacePoint& p, const SensorGeometry& g);

enum class PoseKind { Rotation, Translation };

std::string to_string(PoseKind kind);
PoseKind pose_kind_from_string(const std::string& name);

// Rotation value is theta in radians (tip contacts); translation value is tau
// in millimetres (side contacts).
struct ContactPose {
  PoseKind kind = PoseKind::Rotation;
  double value = 0.0;

  static ContactPose rotation(double theta_rad) { return {PoseKind::Rotation, theta_rad}; }
  static ContactPose translation(double tau_mm) { return {PoseKind::Translation, tau_mm}; }
  friend bool operator==(const ContactPose&, const ContactPose&) = default;
};

// Ground-truth contact point of a protocol pose. Rotation(theta) lands on the
// tip at (r sin theta, 0, d + r cos theta); Translation(tau) on the side at
// (r, 0, d - tau). Throws std::invalid_argument outside theta in [0, pi/2) or
// tau in [0, d].
SurfacePoint pose_to_contact_point(const ContactPose& pose, const SensorGeometry& g);

// Four tip rotations followed by four side translations.
std::array<ContactPose, 8> protocol_poses();

}  // namespace tipsense
