#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "tipsense/imaging.hpp"

using namespace tipsense;
using std::numbers::pi;

namespace {

double mass(const DiffImage& d) {
  const auto px = d.pixels();
  return std::accumulate(px.begin(), px.end(), 0.0);
}

void fill_square(DiffImage& d, int u0, int v0, int side, double value) {
  for (int v = v0; v < v0 + side; ++v) {
    for (int u = u0; u < u0 + side; ++u) {
      d.at(u, v) = value;
    }
  }
}

DiffImage random_blobs(std::uint64_t seed, int w, int h) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(0.0, 120.0);
  std::uniform_int_distribution<int> U(5, w - 20), V(5, h - 20), S(3, 10);
  DiffImage d(w, h);
  for (int i = 0; i < 6; ++i) {
    const int u0 = U(rng), v0 = V(rng), s = S(rng);
    for (int v = v0; v < v0 + s; ++v) {
      for (int u = u0; u < u0 + s; ++u) {
        d.at(u, v) = val(rng);
      }
    }
  }
  return d;
}

}  // namespace

TEST_CASE("subtract_reference") {
  TactileImage ref(16, 8, 128);
  CHECK(mass(subtract_reference(ref, ref)) == 0.0);
  TactileImage frame = ref;
  frame.at(3, 4) = 200;
  const DiffImage d = subtract_reference(ref, frame);
  CHECK(d.at(3, 4) == 72.0);
  CHECK(mass(d) == 72.0);
  CHECK(subtract_reference(frame, ref) == d);
  CHECK_THROWS_AS(subtract_reference(ref, TactileImage(8, 8)), std::invalid_argument);
}

TEST_CASE("gaussian kernel") {
  const auto k = gaussian_kernel(2.0);
  CHECK(k.size() == 13);
  CHECK(std::accumulate(k.begin(), k.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k[6] > k[5]);
  CHECK(k[0] == doctest::Approx(k[12]));
  CHECK(gaussian_kernel(0.0) == std::vector<double>{1.0});
}

TEST_CASE("smooth") {
  DiffImage d(40, 40);
  d.at(20, 20) = 100.0;
  CHECK(smooth(d, 0.0) == d);
  const DiffImage s = smooth(d, 2.0);
  CHECK(std::abs(mass(s) - 100.0) < 1.0);
  CHECK(s.at(20, 20) == *std::max_element(s.pixels().begin(), s.pixels().end()));
  CHECK(s.at(18, 20) == doctest::Approx(s.at(22, 20)));

  DiffImage flat(30, 20, 7.5);
  const DiffImage sf = smooth(flat, 2.0);
  for (double x : sf.pixels()) {
    CHECK(x == doctest::Approx(7.5).epsilon(1e-12));
  }
  CHECK_THROWS_AS(smooth(d, -1.0), std::invalid_argument);
}

TEST_CASE("detect_blobs examples") {
  DiffImage d(300, 300);
  CHECK(detect_blobs(d, 25, 20).empty());

  fill_square(d, 100, 200, 5, 50.0);
  auto blobs = detect_blobs(d, 25, 20);
  REQUIRE(blobs.size() == 1);
  CHECK(blobs[0].centroid.u == doctest::Approx(102));
  CHECK(blobs[0].centroid.v == doctest::Approx(202));
  CHECK(blobs[0].area_px == 25);
  CHECK(blobs[0].peak == 50.0);
  CHECK(blobs[0].total_mass == 1250.0);

  // masses 50 and 100; the heavier one is found second in scan order but listed first
  DiffImage m(50, 50);
  fill_square(m, 5, 5, 2, 12.5);
  fill_square(m, 30, 30, 2, 25.0);
  auto two = detect_blobs(m, 10, 1);
  REQUIRE(two.size() == 2);
  CHECK(two[0].total_mass == 100.0);
  CHECK(two[0].centroid.u == doctest::Approx(30.5));
  CHECK(two[1].total_mass == 50.0);

  CHECK_THROWS_AS(detect_blobs(d, 0, 1), std::invalid_argument);
}

TEST_CASE("detect_blobs connectivity, threshold and min area") {
  DiffImage d(20, 20);
  d.at(5, 5) = d.at(6, 6) = d.at(7, 7) = 40.0;  // diagonal chain: one blob under 8-connectivity
  auto b = detect_blobs(d, 25, 1);
  REQUIRE(b.size() == 1);
  CHECK(b[0].area_px == 3);
  CHECK(detect_blobs(d, 25, 4).empty());
  CHECK(detect_blobs(d, 40, 1).empty());  // strictly greater than the threshold
}

TEST_CASE("detect_blobs is translation equivariant") {
  const DiffImage d = random_blobs(17, 200, 150);
  const auto base = detect_blobs(d, 25, 5);
  REQUIRE_FALSE(base.empty());
  for (auto [du, dv] : {std::pair{3, 0}, {0, 7}, {-4, 5}}) {
    DiffImage shifted(d.width() + 20, d.height() + 20);
    for (int v = 0; v < d.height(); ++v) {
      for (int u = 0; u < d.width(); ++u) {
        shifted.at(u + 10 + du, v + 10 + dv) = d.at(u, v);
      }
    }
    const auto moved = detect_blobs(shifted, 25, 5);
    REQUIRE(moved.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(moved[i].centroid.u - base[i].centroid.u == doctest::Approx(10 + du).epsilon(1e-12));
      CHECK(moved[i].centroid.v - base[i].centroid.v == doctest::Approx(10 + dv).epsilon(1e-12));
      CHECK(moved[i].area_px == base[i].area_px);
    }
  }
}

TEST_CASE("localize_contact") {
  const SensorGeometry g;
  const CameraIntrinsics k;
  ContactBlob b;
  b.centroid = {960, 540};
  CHECK(localize_contact(b, k, g).point.mm == Eigen::Vector3d(0, 0, 40));
  b.centroid = {1160, 540};
  CHECK((localize_contact(b, k, g).point.mm - Eigen::Vector3d(10, 0, 15)).norm() < 1e-12);
  b.centroid = {-400, 3000};
  CHECK_THROWS_AS(localize_contact(b, k, g), NoIntersection);
}

TEST_CASE("localization error is a metric") {
  auto err = [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return localization_error({{}, {a, Region::Tip}}, {b, Region::Tip});
  };
  CHECK(err({0, 0, 40}, {0, 0, 40}) == 0.0);
  CHECK(err({0, 0, 40}, {0, 0, 37}) == 3.0);
  CHECK(err({3, 4, 0}, {0, 0, 0}) == 5.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> R(-20, 20);
  for (int i = 0; i < 300; ++i) {
    const Eigen::Vector3d a(R(rng), R(rng), R(rng)), b(R(rng), R(rng), R(rng)), c(R(rng), R(rng), R(rng));
    CHECK(err(a, b) == err(b, a));
    CHECK(err(a, b) > 0.0);
    CHECK(err(a, c) <= err(a, b) + err(b, c) + 1e-12);
  }
}

TEST_CASE("aggregate_errors") {
  std::vector<ErrorRecord> recs;
  const std::string objects[] = {"cone", "sphere", "slab"};
  for (const auto& o : objects) {
    for (const auto& p : protocol_poses()) {
      recs.push_back({o, p, 2.0});
    }
  }
  const auto t = aggregate_errors(recs);
  REQUIRE(t.by_pose.size() == 8);
  REQUIRE(t.by_object.size() == 3);
  for (const auto& s : t.by_pose) {
    CHECK(s.mean_mm == 2.0);
    CHECK(s.std_mm == 0.0);
    CHECK(s.count == 3);
  }
  CHECK(t.by_pose[0].label == "rotation 0");
  CHECK(t.by_pose[1].label == "rotation pi/6");
  CHECK(t.by_pose[4].label == "translation 0");
  CHECK(t.by_object[0].label == "cone");
  CHECK(t.by_object[2].label == "slab");

  const auto g2 = aggregate_errors({{"cone", ContactPose::rotation(0), 1.0}, {"cone", ContactPose::rotation(0), 3.0}});
  CHECK(g2.by_object[0].mean_mm == 2.0);
  CHECK(g2.by_object[0].std_mm == doctest::Approx(std::sqrt(2.0)));
  CHECK(g2.by_object[0].std_mm == doctest::Approx(1.414).epsilon(1e-3));

  CHECK_THROWS_AS(aggregate_errors({}), std::invalid_argument);
}

TEST_CASE("aggregate_errors is permutation invariant") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> E(0.0, 9.0);
  std::vector<ErrorRecord> recs;
  for (const char* o : {"tube", "cone", "edge", "mystery"}) {
    for (const auto& p : protocol_poses()) {
      recs.push_back({o, p, E(rng)});
    }
  }
  recs.push_back({"cone", ContactPose::translation(7.5), 1.25});
  const auto base = aggregate_errors(recs);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(recs.begin(), recs.end(), rng);
    const auto t = aggregate_errors(recs);
    REQUIRE(t.by_pose.size() == base.by_pose.size());
    REQUIRE(t.by_object.size() == base.by_object.size());
    for (std::size_t i = 0; i < t.by_pose.size(); ++i) {
      CHECK(t.by_pose[i].label == base.by_pose[i].label);
      CHECK(t.by_pose[i].mean_mm == base.by_pose[i].mean_mm);
      CHECK(t.by_pose[i].std_mm == base.by_pose[i].std_mm);
    }
    for (std::size_t i = 0; i < t.by_object.size(); ++i) {
      CHECK(t.by_object[i].label == base.by_object[i].label);
      CHECK(t.by_object[i].mean_mm == base.by_object[i].mean_mm);
    }
  }
  // known objects keep table order, unknown ones go last
  CHECK(base.by_object.front().label == "cone");
  CHECK(base.by_object.back().label == "mystery");
  CHECK(base.by_pose.back().label == "translation 7.5");
}

TEST_CASE("hardware reference tables") {
  CHECK(std::size(kHardwareErrorsByPose) == 8);
  CHECK(kHardwareErrorsByPose[0].mean_mm == 4.71);
  CHECK(kHardwareErrorsByPose[7].std_mm == 8.41);
  CHECK(std::string(kHardwareErrorsByObject[0].label) == "cone");
  CHECK(kHardwareErrorsByObject[0].mean_mm == 3.63);
  CHECK(kHardwareErrorsByObject[6].std_mm == 8.17);
}

TEST_CASE("serial and parallel kernels agree exactly") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> I(0, 255);
  TactileImage a(321, 97), b(321, 97);
  for (auto& p : a.pixels()) p = static_cast<std::uint8_t>(I(rng));
  for (auto& p : b.pixels()) p = static_cast<std::uint8_t>(I(rng));
  const DiffImage d = subtract_reference(a, b);
  CHECK(d == serial::subtract_reference(a, b));
  CHECK(smooth(d, 2.0) == serial::smooth(d, 2.0));
  CHECK(smooth(d, 0.7) == serial::smooth(d, 0.7));
}

TEST_CASE("PGM read and write") {
  const auto dir = std::filesystem::temp_directory_path() / "tipsense_pgm";
  std::filesystem::create_directories(dir);
  TactileImage img(7, 3);
  for (int i = 0; i < 21; ++i) img.pixels()[i] = static_cast<std::uint8_t>(i * 12);
  write_pgm(dir / "a.pgm", img);
  CHECK(read_pgm(dir / "a.pgm") == img);

  {
    std::ofstream f(dir / "c.ppm", std::ios::binary);
    f << "P6\n# comment\n2 1\n255\n";
    const unsigned char rgb[] = {10, 20, 30, 255, 255, 254};
    f.write(reinterpret_cast<const char*>(rgb), 6);
  }
  const auto gray = read_pgm(dir / "c.ppm");
  CHECK(gray.at(0, 0) == 20);
  CHECK(gray.at(1, 0) == 255);

  { std::ofstream(dir / "t.pgm", std::ios::binary) << "P5\n4 4\n255\nabc"; }
  CHECK_THROWS_AS(read_pgm(dir / "t.pgm"), IoError);
  { std::ofstream(dir / "p2.pgm") << "P2\n1 1\n255\n0\n"; }
  CHECK_THROWS_AS(read_pgm(dir / "p2.pgm"), IoError);
  CHECK_THROWS_AS(read_pgm(dir / "nope.pgm"), IoError);
  CHECK_THROWS_AS(write_pgm(dir / "no_such_dir" / "x.pgm", img), IoError);
}
