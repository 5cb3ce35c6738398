#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "tipsense/calibration.hpp"

using namespace tipsense;

namespace {

const SensorGeometry G{};
const CameraIntrinsics K{};

std::vector<Correspondence> synthetic(int n, std::uint64_t seed, double noise_px = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(100.0, 1820.0), V(60.0, 1020.0);
  std::normal_distribution<double> N(0.0, noise_px > 0 ? noise_px : 1.0);
  std::vector<Correspondence> cs;
  for (int i = 0; i < n; ++i) {
    const PixelCoord px{U(rng), V(rng)};
    Correspondence c{px, back_project(px, K, G).mm};
    if (noise_px > 0) {
      c.pixel.u += N(rng);
      c.pixel.v += N(rng);
    }
    cs.push_back(c);
  }
  return cs;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / ("tipsense_cal_" + name);
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("solve_alpha examples") {
  CHECK(solve_alpha({{1160, 540}, {10, 0, 15}}, 960, 540) == doctest::Approx(300).epsilon(1e-12));
  CHECK(solve_alpha({{960, 640}, {0, 5, 15}}, 960, 540) == doctest::Approx(300).epsilon(1e-12));
  try {
    solve_alpha({{960, 540}, {0, 0, 40}}, 960, 540);
    FAIL("expected an error");
  } catch (const CalibrationError& e) {
    CHECK(e.kind() == CalibrationError::Kind::Unobservable);
  }
}

TEST_CASE("solve_alpha recovers alpha and is invariant to scaling the point") {
  for (const auto& c : synthetic(200, 21)) {
    if (std::hypot(c.pixel.u - 960, c.pixel.v - 540) < 1) {
      continue;
    }
    const double a = solve_alpha(c, 960, 540);
    CHECK(a == doctest::Approx(300).epsilon(1e-9));
    Correspondence scaled = c;
    scaled.point_mm *= 3.7;
    CHECK(solve_alpha(scaled, 960, 540) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("reprojection residuals") {
  auto cs = synthetic(10, 1);
  for (double r : reprojection_residuals(K, cs)) {
    CHECK(r < 1e-9);
  }
  cs[4].pixel.u += 3;
  cs[4].pixel.v += 4;
  const auto res = reprojection_residuals(K, cs);
  CHECK(res[4] == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(res[3] < 1e-9);
  CHECK(reprojection_residuals(K, {}).empty());
}

TEST_CASE("noise-free fit recovers the intrinsics") {
  const auto cs = synthetic(10, 2);
  CameraIntrinsics init = K;
  init.alpha_px = 250;
  init.cx_px = 900;
  init.cy_px = 500;
  const auto res = fit_intrinsics(cs, init);
  CHECK(std::abs(res.intrinsics.alpha_px / 300 - 1) < 1e-6);
  CHECK(std::abs(res.intrinsics.cx_px / 960 - 1) < 1e-6);
  CHECK(std::abs(res.intrinsics.cy_px / 540 - 1) < 1e-6);
  CHECK(res.rms_residual_px < 1e-6);
  CHECK(res.intrinsics.width_px == K.width_px);
  CHECK(res.per_point_residuals_px.size() == cs.size());

  double sq = 0;
  for (double r : res.per_point_residuals_px) {
    sq += r * r;
  }
  CHECK(res.rms_residual_px == doctest::Approx(std::sqrt(sq / cs.size())));
}

TEST_CASE("fit is invariant to correspondence order") {
  auto cs = synthetic(12, 8, 0.5);
  const auto a = fit_intrinsics(cs, K);
  std::reverse(cs.begin(), cs.end());
  std::rotate(cs.begin(), cs.begin() + 5, cs.end());
  const auto b = fit_intrinsics(cs, K);
  CHECK(a.intrinsics.alpha_px == doctest::Approx(b.intrinsics.alpha_px).epsilon(1e-9));
  CHECK(a.intrinsics.cx_px == doctest::Approx(b.intrinsics.cx_px).epsilon(1e-9));
  CHECK(a.intrinsics.cy_px == doctest::Approx(b.intrinsics.cy_px).epsilon(1e-9));
  CHECK(a.rms_residual_px == doctest::Approx(b.rms_residual_px).epsilon(1e-9));
}

TEST_CASE("noisy fit: rms residual tracks the pixel noise") {
  std::vector<double> rms;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    rms.push_back(fit_intrinsics(synthetic(10, 1000 + seed, 0.5), K).rms_residual_px);
  }
  std::nth_element(rms.begin(), rms.begin() + 50, rms.end());
  const double median = rms[50];
  CHECK(median >= 0.25);
  CHECK(median <= 1.0);
}

TEST_CASE("degenerate fits") {
  const auto cs = synthetic(2, 4);
  try {
    fit_intrinsics(cs, K);
    FAIL("expected rank deficiency");
  } catch (const CalibrationError& e) {
    CHECK(e.kind() == CalibrationError::Kind::RankDeficient);
  }
  // Every point on one viewing ray: alpha and the principal point trade off.
  std::vector<Correspondence> ray;
  for (double s : {1.0, 2.0, 3.0, 4.0}) {
    ray.push_back({{1160, 540}, Eigen::Vector3d(10, 0, 15) * s});
  }
  CHECK_THROWS_AS(fit_intrinsics(ray, K), CalibrationError);

  FitOptions tight;
  tight.max_iterations = 1;
  CameraIntrinsics far = K;
  far.alpha_px = 50;
  try {
    fit_intrinsics(synthetic(10, 9, 0.5), far, tight);
    FAIL("expected non-convergence");
  } catch (const CalibrationError& e) {
    CHECK(e.kind() == CalibrationError::Kind::NotConverged);
  }
}

TEST_CASE("correspondence CSV round trip and errors") {
  const auto cs = synthetic(5, 6);
  const auto path = std::filesystem::temp_directory_path() / "tipsense_cal_roundtrip.csv";
  write_correspondences_csv(path, cs);
  const auto back = read_correspondences_csv(path);
  REQUIRE(back.size() == cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    CHECK(back[i].pixel.u == cs[i].pixel.u);
    CHECK(back[i].pixel.v == cs[i].pixel.v);
    CHECK(back[i].point_mm == cs[i].point_mm);
  }

  const auto bad = temp_file("bad.csv", "u,v,x,y,z\n1160,540,10,0,15\n1,2,three,4,5\n");
  try {
    read_correspondences_csv(bad);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
  CHECK_THROWS(read_correspondences_csv(temp_file("hdr.csv", "a,b,c\n1,2,3\n")));
  CHECK_THROWS(read_correspondences_csv(temp_file("short.csv", "u,v,x,y,z\n1,2,3,4\n")));
  CHECK_THROWS(read_correspondences_csv(std::filesystem::temp_directory_path() / "tipsense_missing.csv"));
}
