#pragma once

// Intrinsic calibration from pixel <-> membrane-point correspondences.

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "tipsense/geometry.hpp"

namespace tipsense {

struct Correspondence {
  PixelCoord pixel;
  Eigen::Vector3d point_mm = Eigen::Vector3d::Zero();
};

struct CalibrationResult {
  CameraIntrinsics intrinsics;
  double rms_residual_px = 0.0;
  std::vector<double> per_point_residuals_px;
  int iterations = 0;
};

class CalibrationError : public std::runtime_error {
 public:
  enum class Kind { Unobservable, RankDeficient, NotConverged };

  CalibrationError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Closed-form least squares for alpha over both ray equations
//   chi = alpha x / z,  gamma = alpha y / z
// given a fixed principal point. Throws CalibrationError(Unobservable) for
// points on the optical axis or pixels at the principal point.
double solve_alpha(const Correspondence& c, double cx_px, double cy_px);

// Euclidean pixel distance between project(point) and pixel, in input order.
std::vector<double> reprojection_residuals(const CameraIntrinsics& k,
                                           const std::vector<Correspondence>& cs);

struct FitOptions {
  int max_iterations = 100;
  double step_tolerance = 1e-10;  // on the parameter update, relative to the parameters
};

// Levenberg-Marquardt over (alpha, cx, cy) minimising squared reprojection
// error, starting from `initial` (frame size is carried through).
CalibrationResult fit_intrinsics(const std::vector<Correspondence>& cs,
                                 const CameraIntrinsics& initial, const FitOptions& options = {});

// Reads a `u,v,x,y,z` CSV. Throws std::runtime_error naming the offending
// line for malformed rows.
std::vector<Correspondence> read_correspondences_csv(const std::filesystem::path& path);
void write_correspondences_csv(const std::filesystem::path& path,
                               const std::vector<Correspondence>& cs);

}  // namespace tipsense
