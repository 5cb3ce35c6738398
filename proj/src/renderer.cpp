#include "tipsense/renderer.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Geometry>

namespace tipsense {

std::string to_string(Shape shape) {
  switch (shape) {
    case Shape::Cone:
      return "cone";
    case Shape::Sphere:
      return "sphere";
    case Shape::Irregular:
      return "irregular";
    case Shape::Cylinder:
      return "cylinder";
    case Shape::Edge:
      return "edge";
    case Shape::Tube:
      return "tube";
    case Shape::Slab:
      return "slab";
  }
  return "unknown";
}

Shape shape_from_string(const std::string& name) {
  for (Shape s : kAllShapes) {
    if (to_string(s) == name) {
      return s;
    }
  }
  throw std::invalid_argument("unknown object '" + name +
                              "' (expected cone, sphere, irregular, cylinder, edge, tube or slab)");
}

double default_characteristic_size_mm(Shape shape) {
  switch (shape) {
    case Shape::Tube:
      return 4.0;
    case Shape::Irregular:
      return 8.0;
    default:
      return 10.0;
  }
}

Indenter make_indenter(Shape shape, const SurfacePoint& contact, double depth_mm) {
  Indenter ind;
  ind.shape = shape;
  ind.characteristic_size_mm = default_characteristic_size_mm(shape);
  ind.contact = contact;
  ind.depth_mm = depth_mm;
  return ind;
}

void Indenter::validate(const SensorGeometry& g) const {
  if (!(depth_mm > 0.0 && depth_mm < g.r_mm)) {
    throw std::invalid_argument("indenter depth must lie in (0, r)");
  }
  if (!(characteristic_size_mm > 0.0 && characteristic_size_mm <= 10.0)) {
    throw std::invalid_argument("indenter characteristic size must lie in (0, 10] mm");
  }
  if (classify_surface_point(contact.mm, g, kSurfaceTolMm) == Region::Off) {
    throw std::invalid_argument("indenter contact point is not on the membrane");
  }
}

namespace {

// Indenter resolved into the tangent frame at its contact point.
class Footprint {
 public:
  Footprint(const Indenter& ind, const SensorGeometry& g) : ind_(ind) {
    SurfacePoint c = ind.contact;
    if (c.region == Region::Off) {
      c.region = classify_surface_point(c.mm, g, kSurfaceTolMm);
    }
    normal_ = surface_normal(c, g);
    Eigen::Vector3d circ(-normal_.y(), normal_.x(), 0.0);
    if (circ.norm() < 1e-12) {
      circ = Eigen::Vector3d::UnitY();
    }
    circ.normalize();
    const Eigen::Vector3d meridian = normal_.cross(circ);
    const double co = std::cos(ind.orientation_rad);
    const double si = std::sin(ind.orientation_rad);
    axis_a_ = co * meridian + si * circ;
    axis_b_ = -si * meridian + co * circ;

    const double s = ind.characteristic_size_mm;
    if (ind.shape == Shape::Sphere) {
      cap_base_ = s / 2;
      const double height = 0.15 * s;
      sphere_radius_ = (cap_base_ * cap_base_ + height * height) / (2 * height);
      sphere_centre_ = ind.contact.mm + sphere_radius_ * normal_;
      cap_cos_ = std::sqrt(std::max(0.0, 1.0 - (cap_base_ / sphere_radius_) * (cap_base_ / sphere_radius_)));
      rim_centre_ = ind.contact.mm + height * normal_;
    }
  }

  double distance(const Eigen::Vector3d& p) const {
    const Eigen::Vector3d q = p - ind_.contact.mm;
    const double a = q.dot(axis_a_);
    const double b = q.dot(axis_b_);
    const double h = q.dot(normal_);
    const double s = ind_.characteristic_size_mm;
    switch (ind_.shape) {
      case Shape::Cone:
        return q.norm();
      case Shape::Sphere:
        return sphere_distance(p);
      case Shape::Irregular: {
        const double lobe = s / 4;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 3; ++i) {
          const double ang = 2.0 * std::numbers::pi * i / 3.0;
          best = std::min(best, disc_distance(a - lobe * std::cos(ang), b - lobe * std::sin(ang), h, lobe));
        }
        return best;
      }
      case Shape::Cylinder:
        return disc_distance(a, b, h, s / 2);
      case Shape::Edge:
        return std::sqrt(sq(std::max(std::abs(a) - s / 2, 0.0)) + b * b + h * h);
      case Shape::Tube: {
        const double rho = std::hypot(a, b);
        const double gap = std::max({rho - s / 2, s / 4 - rho, 0.0});
        return std::hypot(gap, h);
      }
      case Shape::Slab:
        return std::sqrt(sq(std::max(std::abs(a) - s / 2, 0.0)) +
                         sq(std::max(std::abs(b) - s / 4, 0.0)) + h * h);
    }
    return q.norm();
  }

  double depth(const Eigen::Vector3d& p) const {
    return std::max(0.0, ind_.depth_mm - distance(p));
  }

 private:
  static double sq(double x) { return x * x; }

  static double disc_distance(double a, double b, double h, double radius) {
    return std::hypot(std::max(std::hypot(a, b) - radius, 0.0), h);
  }

  double sphere_distance(const Eigen::Vector3d& p) const {
    const Eigen::Vector3d w = p - sphere_centre_;
    const double len = w.norm();
    if (len > 0.0 && -w.dot(normal_) / len >= cap_cos_) {
      return std::max(len - sphere_radius_, 0.0);
    }
    // Nearest feature is the rim of the cap.
    const Eigen::Vector3d q = p - rim_centre_;
    const double h = q.dot(normal_);
    const double rho = std::hypot(q.dot(axis_a_), q.dot(axis_b_));
    return std::hypot(rho - cap_base_, h);
  }

  Indenter ind_;
  Eigen::Vector3d normal_;
  Eigen::Vector3d axis_a_;
  Eigen::Vector3d axis_b_;
  double cap_base_ = 0.0;
  double sphere_radius_ = 0.0;
  double cap_cos_ = 0.0;
  Eigen::Vector3d sphere_centre_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d rim_centre_ = Eigen::Vector3d::Zero();
};

void reference_row(const SensorGeometry& g, const CameraIntrinsics& k, TactileImage& img, int v) {
  auto out = img.row(v);
  for (int u = 0; u < img.width(); ++u) {
    out[u] = try_back_project({static_cast<double>(u), static_cast<double>(v)}, k, g)
                 ? kReferenceIntensity
                 : std::uint8_t{0};
  }
}

void contact_row(const Footprint& fp, double depth_mm, const SensorGeometry& g,
                 const CameraIntrinsics& k, TactileImage& img, int v) {
  auto out = img.row(v);
  for (int u = 0; u < img.width(); ++u) {
    const auto sp = try_back_project({static_cast<double>(u), static_cast<double>(v)}, k, g);
    if (!sp) {
      out[u] = 0;
      continue;
    }
    const double value = kReferenceIntensity + kImprintGain * fp.depth(sp->mm) / depth_mm;
    out[u] = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
  }
}

}  // namespace

double indentation_depth(const Eigen::Vector3d& p, const Indenter& ind, const SensorGeometry& g) {
  return Footprint(ind, g).depth(p);
}

TactileImage render_reference(const SensorGeometry& g, const CameraIntrinsics& k) {
  TactileImage img(k.width_px, k.height_px);
  const int height = img.height();
#pragma omp parallel for schedule(static)
  for (int v = 0; v < height; ++v) {
    reference_row(g, k, img, v);
  }
  return img;
}

TactileImage render_contact(const Indenter& ind, const SensorGeometry& g, const CameraIntrinsics& k) {
  ind.validate(g);
  const Footprint fp(ind, g);
  TactileImage img(k.width_px, k.height_px);
  const int height = img.height();
#pragma omp parallel for schedule(dynamic, 16)
  for (int v = 0; v < height; ++v) {
    contact_row(fp, ind.depth_mm, g, k, img, v);
  }
  return img;
}

namespace serial {

TactileImage render_reference(const SensorGeometry& g, const CameraIntrinsics& k) {
  TactileImage img(k.width_px, k.height_px);
  for (int v = 0; v < img.height(); ++v) {
    reference_row(g, k, img, v);
  }
  return img;
}

TactileImage render_contact(const Indenter& ind, const SensorGeometry& g, const CameraIntrinsics& k) {
  ind.validate(g);
  const Footprint fp(ind, g);
  TactileImage img(k.width_px, k.height_px);
  for (int v = 0; v < img.height(); ++v) {
    contact_row(fp, ind.depth_mm, g, k, img, v);
  }
  return img;
}

}  // namespace serial

}  // namespace tipsense
