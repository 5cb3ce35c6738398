#include "tipsense/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

namespace tipsense {

void DetectionParams::validate() const {
  if (!(sigma_px >= 0.0)) {
    throw std::invalid_argument("detection: sigma_px must be >= 0");
  }
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("detection: threshold must be > 0");
  }
  if (min_area_px < 1) {
    throw std::invalid_argument("detection: min_area_px must be >= 1");
  }
}

namespace {

void check_same_shape(const TactileImage& a, const TactileImage& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(fmt::format("image size mismatch: {}x{} vs {}x{}", a.width(),
                                            a.height(), b.width(), b.height()));
  }
}

void diff_row(const TactileImage& ref, const TactileImage& frame, DiffImage& out, int v) {
  const auto a = ref.row(v);
  const auto b = frame.row(v);
  auto o = out.row(v);
  for (std::size_t u = 0; u < o.size(); ++u) {
    o[u] = std::abs(static_cast<double>(b[u]) - static_cast<double>(a[u]));
  }
}

void blur_row_horizontal(const DiffImage& src, DiffImage& dst, int v,
                         const std::vector<double>& taps) {
  const int radius = static_cast<int>(taps.size() / 2);
  const int last = src.width() - 1;
  const auto in = src.row(v);
  auto out = dst.row(v);
  for (int u = 0; u <= last; ++u) {
    double acc = 0.0;
    for (int t = -radius; t <= radius; ++t) {
      acc += taps[t + radius] * in[std::clamp(u + t, 0, last)];
    }
    out[u] = acc;
  }
}

void blur_row_vertical(const DiffImage& src, DiffImage& dst, int v,
                       const std::vector<double>& taps) {
  const int radius = static_cast<int>(taps.size() / 2);
  const int last = src.height() - 1;
  auto out = dst.row(v);
  std::fill(out.begin(), out.end(), 0.0);
  for (int t = -radius; t <= radius; ++t) {
    const auto in = src.row(std::clamp(v + t, 0, last));
    const double w = taps[t + radius];
    for (std::size_t u = 0; u < out.size(); ++u) {
      out[u] += w * in[u];
    }
  }
}

}  // namespace

std::vector<double> gaussian_kernel(double sigma_px) {
  if (!(sigma_px > 0.0)) {
    return {1.0};
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma_px));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    taps[t + radius] = std::exp(-0.5 * (t * t) / (sigma_px * sigma_px));
    sum += taps[t + radius];
  }
  for (double& w : taps) {
    w /= sum;
  }
  return taps;
}

DiffImage subtract_reference(const TactileImage& ref, const TactileImage& frame) {
  check_same_shape(ref, frame);
  DiffImage out(ref.width(), ref.height());
  const int height = ref.height();
#pragma omp parallel for schedule(static)
  for (int v = 0; v < height; ++v) {
    diff_row(ref, frame, out, v);
  }
  return out;
}

DiffImage smooth(const DiffImage& d, double sigma_px) {
  if (sigma_px < 0.0) {
    throw std::invalid_argument("smooth: sigma must be >= 0");
  }
  if (sigma_px == 0.0) {
    return d;
  }
  const std::vector<double> taps = gaussian_kernel(sigma_px);
  DiffImage tmp(d.width(), d.height());
  DiffImage out(d.width(), d.height());
  const int height = d.height();
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int v = 0; v < height; ++v) {
      blur_row_horizontal(d, tmp, v, taps);
    }
#pragma omp for schedule(static)
    for (int v = 0; v < height; ++v) {
      blur_row_vertical(tmp, out, v, taps);
    }
  }
  return out;
}

namespace serial {

DiffImage subtract_reference(const TactileImage& ref, const TactileImage& frame) {
  check_same_shape(ref, frame);
  DiffImage out(ref.width(), ref.height());
  for (int v = 0; v < ref.height(); ++v) {
    diff_row(ref, frame, out, v);
  }
  return out;
}

DiffImage smooth(const DiffImage& d, double sigma_px) {
  if (sigma_px < 0.0) {
    throw std::invalid_argument("smooth: sigma must be >= 0");
  }
  if (sigma_px == 0.0) {
    return d;
  }
  const std::vector<double> taps = gaussian_kernel(sigma_px);
  DiffImage tmp(d.width(), d.height());
  DiffImage out(d.width(), d.height());
  for (int v = 0; v < d.height(); ++v) {
    blur_row_horizontal(d, tmp, v, taps);
  }
  for (int v = 0; v < d.height(); ++v) {
    blur_row_vertical(tmp, out, v, taps);
  }
  return out;
}

}  // namespace serial

std::vector<ContactBlob> detect_blobs(const DiffImage& d, double threshold, int min_area_px) {
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("detect_blobs: threshold must be > 0");
  }
  const int width = d.width();
  const int height = d.height();
  std::vector<char> visited(d.size(), 0);
  std::vector<std::pair<int, int>> stack;
  std::vector<ContactBlob> blobs;

  for (int v0 = 0; v0 < height; ++v0) {
    for (int u0 = 0; u0 < width; ++u0) {
      const std::size_t seed = static_cast<std::size_t>(v0) * width + u0;
      if (visited[seed] || !(d.at(u0, v0) > threshold)) {
        continue;
      }
      visited[seed] = 1;
      stack.assign(1, {u0, v0});
      ContactBlob blob;
      double sum_u = 0.0;
      double sum_v = 0.0;
      while (!stack.empty()) {
        const auto [u, v] = stack.back();
        stack.pop_back();
        const double w = d.at(u, v);
        ++blob.area_px;
        blob.total_mass += w;
        blob.peak = std::max(blob.peak, w);
        sum_u += w * u;
        sum_v += w * v;
        for (int dv = -1; dv <= 1; ++dv) {
          for (int du = -1; du <= 1; ++du) {
            const int nu = u + du;
            const int nv = v + dv;
            if (nu < 0 || nv < 0 || nu >= width || nv >= height) {
              continue;
            }
            const std::size_t idx = static_cast<std::size_t>(nv) * width + nu;
            if (!visited[idx] && d.at(nu, nv) > threshold) {
              visited[idx] = 1;
              stack.emplace_back(nu, nv);
            }
          }
        }
      }
      if (blob.area_px < min_area_px) {
        continue;
      }
      blob.centroid = {sum_u / blob.total_mass, sum_v / blob.total_mass};
      blobs.push_back(blob);
    }
  }
  std::stable_sort(blobs.begin(), blobs.end(), [](const ContactBlob& a, const ContactBlob& b) {
    return a.total_mass > b.total_mass;
  });
  return blobs;
}

ContactEstimate localize_contact(const ContactBlob& blob, const CameraIntrinsics& k,
                                 const SensorGeometry& g) {
  return {blob.centroid, back_project(blob.centroid, k, g)};
}

double localization_error(const ContactEstimate& e, const SurfacePoint& truth) {
  return (e.point.mm - truth.mm).norm();
}

std::optional<ContactEstimate> locate_contact(const TactileImage& ref, const TactileImage& frame,
                                              const DetectionParams& params,
                                              const CameraIntrinsics& k,
                                              const SensorGeometry& g) {
  const DiffImage diff = smooth(subtract_reference(ref, frame), params.sigma_px);
  const std::vector<ContactBlob> blobs = detect_blobs(diff, params.threshold, params.min_area_px);
  if (blobs.empty()) {
    return std::nullopt;
  }
  return localize_contact(blobs.front(), k, g);
}

std::string pose_label(const ContactPose& pose) {
  if (pose.kind == PoseKind::Translation) {
    return fmt::format("translation {:g}", pose.value);
  }
  using std::numbers::pi;
  struct Named {
    double value;
    const char* name;
  };
  static constexpr Named named[] = {{0.0, "0"}, {pi / 6, "pi/6"}, {pi / 4, "pi/4"}, {pi / 3, "pi/3"}};
  for (const Named& n : named) {
    if (std::abs(pose.value - n.value) < 1e-12) {
      return fmt::format("rotation {}", n.name);
    }
  }
  return fmt::format("rotation {:g}", pose.value);
}

namespace {

GroupStat summarise(const std::string& label, std::vector<double> values) {
  // Sorting fixes the summation order, so the result does not depend on the
  // order records arrived in.
  std::sort(values.begin(), values.end());
  GroupStat s;
  s.label = label;
  s.count = static_cast<int>(values.size());
  double sum = 0.0;
  for (double x : values) {
    sum += x;
  }
  s.mean_mm = sum / s.count;
  if (s.count > 1) {
    double sq = 0.0;
    for (double x : values) {
      sq += (x - s.mean_mm) * (x - s.mean_mm);
    }
    s.std_mm = std::sqrt(sq / (s.count - 1));
  }
  return s;
}

template <typename Key>
std::vector<GroupStat> grouped(const std::map<Key, std::pair<std::string, std::vector<double>>>& groups) {
  std::vector<GroupStat> out;
  out.reserve(groups.size());
  for (const auto& [key, entry] : groups) {
    out.push_back(summarise(entry.first, entry.second));
  }
  return out;
}

}  // namespace

ErrorTables aggregate_errors(const std::vector<ErrorRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("aggregate_errors: no records to aggregate");
  }
  // Sort keys: (rank in the protocol order, then natural order for others).
  using PoseKey = std::tuple<int, int, double>;
  using ObjectKey = std::pair<int, std::string>;
  std::map<PoseKey, std::pair<std::string, std::vector<double>>> by_pose;
  std::map<ObjectKey, std::pair<std::string, std::vector<double>>> by_object;

  const auto poses = protocol_poses();
  for (const ErrorRecord& rec : records) {
    int pose_rank = static_cast<int>(poses.size());
    for (std::size_t i = 0; i < poses.size(); ++i) {
      if (poses[i].kind == rec.pose.kind && std::abs(poses[i].value - rec.pose.value) < 1e-12) {
        pose_rank = static_cast<int>(i);
      }
    }
    const PoseKey pk = pose_rank < static_cast<int>(poses.size())
                           ? PoseKey{pose_rank, 0, 0.0}
                           : PoseKey{pose_rank, static_cast<int>(rec.pose.kind), rec.pose.value};
    auto& pose_group = by_pose[pk];
    pose_group.first = pose_label(rec.pose);
    pose_group.second.push_back(rec.error_mm);

    int object_rank = static_cast<int>(std::size(kHardwareErrorsByObject));
    for (std::size_t i = 0; i < std::size(kHardwareErrorsByObject); ++i) {
      if (rec.object == kHardwareErrorsByObject[i].label) {
        object_rank = static_cast<int>(i);
      }
    }
    auto& object_group = by_object[{object_rank, rec.object}];
    object_group.first = rec.object;
    object_group.second.push_back(rec.error_mm);
  }
  return {grouped(by_pose), grouped(by_object)};
}

}  // namespace tipsense
