// tipsense: render, localise, calibrate and simulate for the finger-shaped
// tactile sensor.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "tipsense/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Tactile finger sensor toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON session configuration")->check(CLI::ExistingFile);

  std::string object;
  std::optional<double> rotation;
  std::optional<double> translation;
  std::string render_out;
  auto* render = app.add_subcommand("render", "Render reference and contact frames for one pose");
  render->add_option("--object", object, "cone|sphere|irregular|cylinder|edge|tube|slab")->required();
  auto* rot_opt = render->add_option("--rotation", rotation, "Tip pose angle theta (rad)");
  auto* tr_opt = render->add_option("--translation", translation, "Side pose offset tau (mm)");
  rot_opt->excludes(tr_opt);
  render->add_option("--out", render_out, "Output directory (default: paths.out_dir)");

  std::string dataset_out;
  double noise = 0.0;
  std::uint64_t seed = 0;
  auto* dataset = app.add_subcommand("dataset", "Render the 7-object x 8-pose protocol dataset");
  dataset->add_option("--out", dataset_out, "Output directory (default: paths.out_dir)");
  dataset->add_option("--noise", noise, "Gaussian pixel noise sigma (intensity levels)")
      ->check(CLI::NonNegativeNumber);
  dataset->add_option("--seed", seed, "Random seed");

  std::string manifest;
  std::string localize_out;
  auto* localize = app.add_subcommand("localize", "Localise contacts for every manifest entry");
  localize->add_option("--manifest", manifest, "Dataset manifest.json")->required();
  localize->add_option("--out", localize_out, "Report directory (default: manifest directory)");

  std::string csv;
  auto* calibrate = app.add_subcommand("calibrate", "Fit intrinsics from a u,v,x,y,z CSV");
  calibrate->add_option("--csv", csv, "Correspondence CSV")->required();

  std::string policy = "all";
  std::int64_t n_boards = 10000;
  auto* blocks = app.add_subcommand("blocksworld", "Simulate the Blocks World grasping policies");
  blocks->add_option("--policy", policy, "control|rg|rgtr|all");
  blocks->add_option("-n,--boards", n_boards, "Number of boards");
  blocks->add_option("--seed", seed, "Random seed");

  CLI11_PARSE(app, argc, argv);

  tipsense::SessionConfig cfg;
  try {
    if (!config_path.empty()) {
      cfg = tipsense::load_config(config_path);
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  const tipsense::CommandStreams io{std::cout, std::cerr};

  if (*render) {
    if (!rotation && !translation) {
      std::cerr << "render: one of --rotation or --translation is required\n";
      return 1;
    }
    const auto pose = rotation ? tipsense::ContactPose::rotation(*rotation)
                               : tipsense::ContactPose::translation(*translation);
    const std::string out = render_out.empty() ? cfg.paths.out_dir : render_out;
    return tipsense::cmd_render(cfg, object, pose, out, io);
  }
  if (*dataset) {
    const std::string out = dataset_out.empty() ? cfg.paths.out_dir : dataset_out;
    return tipsense::cmd_dataset(cfg, out, noise, seed, io);
  }
  if (*localize) {
    const std::filesystem::path m(manifest);
    const std::filesystem::path out = localize_out.empty() ? m.parent_path() : std::filesystem::path(localize_out);
    return tipsense::cmd_localize(cfg, m, out.empty() ? std::filesystem::path(".") : out, io);
  }
  if (*calibrate) {
    return tipsense::cmd_calibrate(cfg, csv, io);
  }
  return tipsense::cmd_blocksworld(cfg, policy, n_boards, seed, io);
}
