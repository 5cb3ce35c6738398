#include "tipsense/calibration.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace tipsense {

double solve_alpha(const Correspondence& c, double cx_px, double cy_px) {
  const Eigen::Vector3d& p = c.point_mm;
  if (!(p.z() > 0.0)) {
    throw std::invalid_argument("solve_alpha: point must have z > 0");
  }
  const double chi = c.pixel.u - cx_px;
  const double gamma = c.pixel.v - cy_px;
  const double planar = p.x() * p.x() + p.y() * p.y();
  if (planar == 0.0 || (chi == 0.0 && gamma == 0.0)) {
    throw CalibrationError(CalibrationError::Kind::Unobservable,
                           "alpha is unobservable from a correspondence on the optical axis");
  }
  return (chi * p.z() * p.x() + gamma * p.z() * p.y()) / planar;
}

std::vector<double> reprojection_residuals(const CameraIntrinsics& k,
                                           const std::vector<Correspondence>& cs) {
  std::vector<double> out;
  out.reserve(cs.size());
  for (const Correspondence& c : cs) {
    const PixelCoord predicted = project(c.point_mm, k);
    out.push_back(std::hypot(predicted.u - c.pixel.u, predicted.v - c.pixel.v));
  }
  return out;
}

namespace {

using Params = Eigen::Vector3d;  // alpha, cx, cy

CameraIntrinsics with_params(CameraIntrinsics k, const Params& p) {
  k.alpha_px = p[0];
  k.cx_px = p[1];
  k.cy_px = p[2];
  return k;
}

// Residual vector stacked as (du_0, dv_0, du_1, dv_1, ...).
Eigen::VectorXd residual_vector(const std::vector<Correspondence>& cs, const Params& p) {
  Eigen::VectorXd r(2 * cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Eigen::Vector3d& q = cs[i].point_mm;
    r[2 * i] = p[0] * q.x() / q.z() + p[1] - cs[i].pixel.u;
    r[2 * i + 1] = p[0] * q.y() / q.z() + p[2] - cs[i].pixel.v;
  }
  return r;
}

Eigen::MatrixXd jacobian(const std::vector<Correspondence>& cs) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * cs.size(), 3);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Eigen::Vector3d& q = cs[i].point_mm;
    j(2 * i, 0) = q.x() / q.z();
    j(2 * i, 1) = 1.0;
    j(2 * i + 1, 0) = q.y() / q.z();
    j(2 * i + 1, 2) = 1.0;
  }
  return j;
}

}  // namespace

CalibrationResult fit_intrinsics(const std::vector<Correspondence>& cs,
                                 const CameraIntrinsics& initial, const FitOptions& options) {
  if (cs.size() < 3) {
    throw CalibrationError(CalibrationError::Kind::RankDeficient,
                           fmt::format("rank deficient: {} correspondence(s) cannot constrain "
                                       "alpha, cx and cy (need at least 3)",
                                       cs.size()));
  }
  for (const Correspondence& c : cs) {
    if (!(c.point_mm.z() > 0.0)) {
      throw std::invalid_argument("fit_intrinsics: every point must have z > 0");
    }
  }

  // The model is linear in (alpha, cx, cy), so J does not depend on the
  // parameters and its conditioning can be checked once.
  const Eigen::MatrixXd j = jacobian(cs);
  const Eigen::Matrix3d jtj = j.transpose() * j;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(jtj);
  const double largest = eig.eigenvalues().maxCoeff();
  if (!(eig.eigenvalues().minCoeff() > 1e-12 * largest)) {
    throw CalibrationError(CalibrationError::Kind::RankDeficient,
                           "rank deficient: correspondences do not separate alpha from the "
                           "principal point");
  }

  Params p(initial.alpha_px, initial.cx_px, initial.cy_px);
  Eigen::VectorXd r = residual_vector(cs, p);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_iterations && !converged; ++iter) {
    const Eigen::Vector3d g = j.transpose() * r;
    Eigen::Matrix3d damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal();
    const Params step = damped.ldlt().solve(-g);
    const Params candidate = p + step;
    const Eigen::VectorXd candidate_r = residual_vector(cs, candidate);
    const double candidate_cost = candidate_r.squaredNorm();
    if (candidate_cost <= cost) {
      p = candidate;
      r = candidate_r;
      cost = candidate_cost;
      lambda = std::max(lambda * 0.1, 1e-12);
    } else {
      lambda *= 10.0;
    }
    converged = step.norm() <= options.step_tolerance * (p.norm() + options.step_tolerance);
  }
  if (!converged) {
    throw CalibrationError(CalibrationError::Kind::NotConverged,
                           fmt::format("fit did not converge within {} iterations",
                                       options.max_iterations));
  }

  CalibrationResult result;
  result.intrinsics = with_params(initial, p);
  result.per_point_residuals_px = reprojection_residuals(result.intrinsics, cs);
  double sum_sq = 0.0;
  for (double e : result.per_point_residuals_px) {
    sum_sq += e * e;
  }
  result.rms_residual_px = std::sqrt(sum_sq / static_cast<double>(cs.size()));
  result.iterations = iter;
  return result;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& field, double& out) {
  const std::string t = trim(field);
  if (t.empty()) {
    return false;
  }
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

std::vector<Correspondence> read_correspondences_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open correspondence file " + path.string());
  }
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::vector<Correspondence> out;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) {
      continue;
    }
    if (!header_seen) {
      if (row != "u,v,x,y,z") {
        throw std::runtime_error(fmt::format("{}:{}: expected header 'u,v,x,y,z'",
                                             path.string(), line_no));
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(row);
    std::string field;
    while (std::getline(ss, field, ',')) {
      fields.push_back(field);
    }
    double values[5];
    bool ok = fields.size() == 5;
    for (std::size_t i = 0; ok && i < 5; ++i) {
      ok = parse_double(fields[i], values[i]);
    }
    if (!ok) {
      throw std::runtime_error(fmt::format("{}:{}: malformed row '{}' (expected 5 numbers)",
                                           path.string(), line_no, row));
    }
    out.push_back({{values[0], values[1]}, Eigen::Vector3d(values[2], values[3], values[4])});
  }
  if (!header_seen) {
    throw std::runtime_error(path.string() + ": missing header 'u,v,x,y,z'");
  }
  return out;
}

void write_correspondences_csv(const std::filesystem::path& path,
                               const std::vector<Correspondence>& cs) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << "u,v,x,y,z\n";
  for (const Correspondence& c : cs) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", c.pixel.u, c.pixel.v,
                       c.point_mm.x(), c.point_mm.y(), c.point_mm.z());
  }
  if (!out) {
    throw std::runtime_error("failed writing " + path.string());
  }
}

}  // namespace tipsense
