#include "tipsense/geometry.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

namespace tipsense {

void SensorGeometry::validate() const {
  if (!(r_mm > 0.0) || !std::isfinite(r_mm)) {
    throw std::invalid_argument("sensor geometry: r_mm must be positive");
  }
  if (!(d_mm >= 0.0) || !std::isfinite(d_mm)) {
    throw std::invalid_argument("sensor geometry: d_mm must be non-negative");
  }
}

void CameraIntrinsics::validate() const {
  if (width_px <= 0 || height_px <= 0) {
    throw std::invalid_argument("camera intrinsics: frame size must be positive");
  }
  if (!(alpha_px > 0.0) || !std::isfinite(alpha_px)) {
    throw std::invalid_argument("camera intrinsics: alpha_px must be positive");
  }
  if (!(cx_px >= 0.0 && cx_px <= width_px)) {
    throw std::invalid_argument("camera intrinsics: cx_px must lie in [0, width_px]");
  }
  if (!(cy_px >= 0.0 && cy_px <= height_px)) {
    throw std::invalid_argument("camera intrinsics: cy_px must lie in [0, height_px]");
  }
}

std::string to_string(Region region) {
  switch (region) {
    case Region::Tip:
      return "tip";
    case Region::Side:
      return "side";
    case Region::Off:
      break;
  }
  return "off";
}

Region classify_surface_point(const Eigen::Vector3d& p, const SensorGeometry& g, double tol_mm) {
  const double radial = std::hypot(p.x(), p.y());
  // The seam circle satisfies both equations; it belongs to the side.
  if (std::abs(radial - g.r_mm) <= tol_mm && p.z() >= -tol_mm && p.z() <= g.d_mm + tol_mm) {
    return Region::Side;
  }
  const double from_centre = std::hypot(radial, p.z() - g.d_mm);
  if (std::abs(from_centre - g.r_mm) <= tol_mm && p.z() > g.d_mm) {
    return Region::Tip;
  }
  return Region::Off;
}

PixelCoord project(const Eigen::Vector3d& p, const CameraIntrinsics& k) {
  if (!(p.z() > 0.0)) {
    throw std::invalid_argument("project: point must lie in front of the camera (z > 0)");
  }
  return {k.alpha_px * p.x() / p.z() + k.cx_px, k.alpha_px * p.y() / p.z() + k.cy_px};
}

namespace {

enum class RayFailure { NotFinite, OutsideFrame, Misses };

struct RayHit {
  SurfacePoint point;
  std::optional<RayFailure> failure;
};

RayHit intersect(PixelCoord px, const CameraIntrinsics& k, const SensorGeometry& g) noexcept {
  if (!std::isfinite(px.u) || !std::isfinite(px.v)) {
    return {{}, RayFailure::NotFinite};
  }
  if (px.u < 0.0 || px.u > k.width_px || px.v < 0.0 || px.v > k.height_px) {
    return {{}, RayFailure::OutsideFrame};
  }

  const double chi = px.u - k.cx_px;
  const double gamma = px.v - k.cy_px;
  const double omega = chi * chi + gamma * gamma;
  const double alpha = k.alpha_px;
  const double r = g.r_mm;
  const double d = g.d_mm;

  if (omega == 0.0) {
    return {{Eigen::Vector3d(0.0, 0.0, d + r), Region::Tip}, std::nullopt};
  }

  double z = 0.0;
  Region region = Region::Side;
  // omega < (r alpha / d)^2, written without dividing by d so that d == 0
  // sends every ray to the tip.
  if (omega * d * d < (r * alpha) * (r * alpha)) {
    // Ray (chi z / alpha, gamma z / alpha, z) on the sphere:
    //   z^2 (omega + alpha^2) - 2 d alpha^2 z + (d^2 - r^2) alpha^2 = 0
    // The camera is inside the membrane, so the far root is the visible one.
    const double a = omega + alpha * alpha;
    const double half_b = d * alpha * alpha;
    const double disc = alpha * alpha * (r * r * alpha * alpha - omega * (d * d - r * r));
    if (disc < 0.0) {
      return {{}, RayFailure::Misses};
    }
    z = (half_b + std::sqrt(disc)) / a;
    region = Region::Tip;
    if (!(z > d)) {
      // Rounding right at the seam; the side owns z == d.
      z = r * alpha / std::sqrt(omega);
      region = Region::Side;
    }
  } else {
    z = r * alpha / std::sqrt(omega);
    if (z > d && z <= d * (1.0 + 1e-12)) {
      z = d;
    }
    if (!(z >= 0.0 && z <= d)) {
      return {{}, RayFailure::Misses};
    }
  }
  return {{Eigen::Vector3d(chi / alpha * z, gamma / alpha * z, z), region}, std::nullopt};
}

}  // namespace

std::optional<SurfacePoint> try_back_project(PixelCoord px, const CameraIntrinsics& k,
                                             const SensorGeometry& g) noexcept {
  RayHit hit = intersect(px, k, g);
  if (hit.failure) {
    return std::nullopt;
  }
  return hit.point;
}

SurfacePoint back_project(PixelCoord px, const CameraIntrinsics& k, const SensorGeometry& g) {
  RayHit hit = intersect(px, k, g);
  if (!hit.failure) {
    return hit.point;
  }
  const std::string where =
      "(" + std::to_string(px.u) + ", " + std::to_string(px.v) + ")";
  switch (*hit.failure) {
    case RayFailure::NotFinite:
      throw NoIntersection("back_project: non-finite pixel coordinate");
    case RayFailure::OutsideFrame:
      throw NoIntersection("back_project: pixel " + where + " lies outside the camera frame");
    case RayFailure::Misses:
      break;
  }
  throw NoIntersection("back_project: ray through " + where + " misses the membrane");
}

double discontinuity_circle_radius_px(const CameraIntrinsics& k, const SensorGeometry& g) {
  if (!(g.d_mm > 0.0)) {
    throw std::invalid_argument("discontinuity circle undefined for d = 0 (hemisphere-only membrane)");
  }
  return g.r_mm * k.alpha_px / g.d_mm;
}

Eigen::Vector3d surface_normal(const SurfacePoint& p, const SensorGeometry& g) {
  const Region region = classify_surface_point(p.mm, g, kSurfaceTolMm);
  if (region == Region::Off || p.region == Region::Off) {
    throw std::invalid_argument("surface_normal: point is not on the membrane");
  }
  if (region == Region::Tip) {
    return (p.mm - Eigen::Vector3d(0.0, 0.0, g.d_mm)).normalized();
  }
  return Eigen::Vector3d(p.mm.x(), p.mm.y(), 0.0).normalized();
}

std::string to_string(PoseKind kind) {
  return kind == PoseKind::Rotation ? "rotation" : "translation";
}

PoseKind pose_kind_from_string(const std::string& name) {
  if (name == "rotation") {
    return PoseKind::Rotation;
  }
  if (name == "translation") {
    return PoseKind::Translation;
  }
  throw std::invalid_argument("unknown pose kind '" + name + "'");
}

SurfacePoint pose_to_contact_point(const ContactPose& pose, const SensorGeometry& g) {
  const double r = g.r_mm;
  const double d = g.d_mm;
  if (pose.kind == PoseKind::Rotation) {
    const double theta = pose.value;
    if (!(theta >= 0.0 && theta < std::numbers::pi / 2)) {
      throw std::invalid_argument("rotation pose must lie in [0, pi/2) rad");
    }
    return {Eigen::Vector3d(r * std::sin(theta), 0.0, d + r * std::cos(theta)), Region::Tip};
  }
  const double tau = pose.value;
  if (!(tau >= 0.0 && tau <= d)) {
    throw std::invalid_argument("translation pose must lie in [0, d] mm");
  }
  return {Eigen::Vector3d(r, 0.0, d - tau), Region::Side};
}

std::array<ContactPose, 8> protocol_poses() {
  using std::numbers::pi;
  return {ContactPose::rotation(0.0),       ContactPose::rotation(pi / 6),
          ContactPose::rotation(pi / 4),    ContactPose::rotation(pi / 3),
          ContactPose::translation(0.0),    ContactPose::translation(5.0),
          ContactPose::translation(10.0),   ContactPose::translation(15.0)};
}

}  // namespace tipsense
