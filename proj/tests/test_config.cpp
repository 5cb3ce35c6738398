#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "tipsense/config.hpp"

using namespace tipsense;
using nlohmann::json;

TEST_CASE("defaults") {
  const SessionConfig c = config_from_json(json::object());
  CHECK(c == SessionConfig{});
  CHECK(c.geometry.r_mm == 10);
  CHECK(c.geometry.d_mm == 30);
  CHECK(c.intrinsics.width_px == 1920);
  CHECK(c.intrinsics.height_px == 1080);
  CHECK(c.detection.threshold == 25);
  CHECK(c.paths.out_dir == "out");
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("partial sections keep defaults for missing keys") {
  const SessionConfig c = config_from_json(json::parse(R"({"geometry": {"d_mm": 20}, "detection": {"sigma_px": 1.5}})"));
  CHECK(c.geometry.d_mm == 20);
  CHECK(c.geometry.r_mm == 10);
  CHECK(c.detection.sigma_px == 1.5);
  CHECK(c.detection.min_area_px == 20);
}

TEST_CASE("unknown keys, wrong types and invalid values are rejected") {
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"geometry": {"radius": 3}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"camera": {}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"geometry": {"r_mm": "ten"}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"geometry": 5})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"([1, 2])")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"geometry": {"r_mm": -1}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"renderer": {"depth_mm": 12}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"detection": {"min_area_px": 0}})")), ConfigError);
}

TEST_CASE("load, save, load round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "tipsense_config_test";
  std::filesystem::create_directories(dir);
  SessionConfig c;
  c.geometry.r_mm = 9.5;
  c.intrinsics.alpha_px = 312.25;
  c.intrinsics.cx_px = 955.125;
  c.detection.threshold = 30;
  c.renderer.depth_mm = 1.2;
  c.paths.out_dir = "/tmp/elsewhere";
  save_config(dir / "a.json", c);
  const SessionConfig back = load_config(dir / "a.json");
  CHECK(back == c);
  save_config(dir / "b.json", back);
  CHECK(load_config(dir / "b.json") == c);
  CHECK(config_to_json(back) == config_to_json(c));

  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  std::filesystem::remove_all(dir);
}
