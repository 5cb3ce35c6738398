#pragma once

// Synthetic tactile frames of parametric indenters pressed into the membrane.
//
// Each indenter has a footprint: a planar set in the tangent plane at the
// contact point (or, for the sphere, a spherical cap). The membrane displaces
// by max(0, depth - dist(p, footprint)), a 45 degree shoulder around the
// footprint, with 3D Euclidean distance standing in for in-surface distance.
// Intensity is 128 + 60 * displacement / depth inside the membrane.

#include <array>
#include <string>

#include "tipsense/geometry.hpp"
#include "tipsense/image.hpp"

namespace tipsense {

enum class Shape { Cone, Sphere, Irregular, Cylinder, Edge, Tube, Slab };

inline constexpr std::array<Shape, 7> kAllShapes = {Shape::Cone,     Shape::Sphere, Shape::Irregular,
                                                    Shape::Cylinder, Shape::Edge,   Shape::Tube,
                                                    Shape::Slab};

std::string to_string(Shape shape);
Shape shape_from_string(const std::string& name);

inline constexpr std::uint8_t kReferenceIntensity = 128;
inline constexpr double kImprintGain = 60.0;

// Footprints scale with characteristic_size_mm (s):
//   Cone       point
//   Sphere     spherical cap, base radius s/2, height 0.15 s
//   Irregular  three discs of radius s/4 centred s/4 from the contact point
//   Cylinder   disc of radius s/2
//   Edge       segment of length s along the meridian
//   Tube       annulus, radii s/4 .. s/2
//   Slab       s x s/2 rectangle, long side along the meridian
// orientation_rad rotates the footprint about the surface normal.
struct Indenter {
  Shape shape = Shape::Cone;
  double characteristic_size_mm = 10.0;
  SurfacePoint contact;
  double depth_mm = 1.5;
  double orientation_rad = 0.0;

  // Throws std::invalid_argument unless 0 < depth < r, 0 < size <= 10 mm and
  // the contact point lies on the membrane.
  void validate(const SensorGeometry& g) const;
};

double default_characteristic_size_mm(Shape shape);

Indenter make_indenter(Shape shape, const SurfacePoint& contact, double depth_mm);

// Membrane displacement at `p` (mm).
double indentation_depth(const Eigen::Vector3d& p, const Indenter& ind, const SensorGeometry& g);

// 128 inside the membrane silhouette (pixels that back-project), 0 outside.
TactileImage render_reference(const SensorGeometry& g, const CameraIntrinsics& k);

TactileImage render_contact(const Indenter& ind, const SensorGeometry& g, const CameraIntrinsics& k);

// Single-threaded versions of the per-pixel kernels.
namespace serial {
TactileImage render_reference(const SensorGeometry& g, const CameraIntrinsics& k);
TactileImage render_contact(const Indenter& ind, const SensorGeometry& g, const CameraIntrinsics& k);
}  // namespace serial

}  // namespace tipsense
