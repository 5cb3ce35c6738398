#include "tipsense/commands.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <vector>

#include <fmt/format.h>

#include "tipsense/blocksworld.hpp"
#include "tipsense/calibration.hpp"
#include "tipsense/dataset.hpp"
#include "tipsense/renderer.hpp"

namespace tipsense {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError(dir, "cannot create output directory");
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError(path, "cannot open for writing");
  }
  return out;
}

json point_json(const Eigen::Vector3d& p) { return json::array({p.x(), p.y(), p.z()}); }

}  // namespace

int cmd_render(const SessionConfig& cfg, const std::string& object, const ContactPose& pose,
               const fs::path& out_dir, CommandStreams io) {
  try {
    const Shape shape = shape_from_string(object);
    const SurfacePoint truth = pose_to_contact_point(pose, cfg.geometry);
    const Indenter ind = make_indenter(shape, truth, cfg.renderer.depth_mm);
    const TactileImage ref = render_reference(cfg.geometry, cfg.intrinsics);
    const TactileImage frame = render_contact(ind, cfg.geometry, cfg.intrinsics);

    ensure_directory(out_dir);
    const std::string frame_name =
        fmt::format("{}_{}_{:g}.pgm", to_string(shape), to_string(pose.kind), pose.value);
    write_pgm(out_dir / "reference.pgm", ref);
    write_pgm(out_dir / frame_name, frame);

    const json result = {{"object", to_string(shape)},
                         {"pose_kind", to_string(pose.kind)},
                         {"pose_value", pose.value},
                         {"truth_mm", point_json(truth.mm)},
                         {"reference", (out_dir / "reference.pgm").string()},
                         {"frame", (out_dir / frame_name).string()}};
    io.out << result.dump() << '\n';
    return 0;
  } catch (const std::exception& e) {
    io.err << "render: " << e.what() << '\n';
    return 1;
  }
}

int cmd_dataset(const SessionConfig& cfg, const fs::path& out_dir, double noise_sigma,
                std::uint64_t seed, CommandStreams io) {
  try {
    const DatasetManifest m =
        generate_protocol_dataset(out_dir, cfg.geometry, cfg.intrinsics, noise_sigma, seed, cfg.renderer);
    io.out << json({{"manifest", (out_dir / kManifestFileName).string()},
                    {"entries", m.entries.size()}})
                  .dump()
           << '\n';
    return 0;
  } catch (const std::exception& e) {
    io.err << "dataset: " << e.what() << '\n';
    return 1;
  }
}

namespace {

void write_group_table(const fs::path& path, const std::vector<GroupStat>& groups,
                       std::span<const HardwareReference> hardware) {
  std::ofstream out = open_output(path);
  out << "group,count,mean_mm,std_mm,hardware_mean_mm,hardware_std_mm\n";
  for (const GroupStat& g : groups) {
    std::string hw_mean = "";
    std::string hw_std = "";
    for (const HardwareReference& h : hardware) {
      if (g.label == h.label) {
        hw_mean = fmt::format("{:.2f}", h.mean_mm);
        hw_std = fmt::format("{:.2f}", h.std_mm);
      }
    }
    out << fmt::format("{},{},{:.6f},{:.6f},{},{}\n", g.label, g.count, g.mean_mm, g.std_mm,
                       hw_mean, hw_std);
  }
  if (!out) {
    throw IoError(path, "write failed");
  }
}

}  // namespace

int cmd_localize(const SessionConfig& cfg, const fs::path& manifest_path, const fs::path& out_dir,
                 CommandStreams io) {
  DatasetManifest manifest;
  try {
    manifest = read_manifest(manifest_path);
  } catch (const std::exception& e) {
    io.err << "localize: " << e.what() << '\n';
    return 1;
  }
  if (manifest.entries.empty()) {
    io.err << "localize: manifest " << manifest_path.string() << " has no entries\n";
    return 1;
  }
  const fs::path base = manifest_path.parent_path();

  std::map<std::string, TactileImage> references;
  std::vector<ErrorRecord> records;
  std::vector<std::string> rows;
  for (const ManifestEntry& entry : manifest.entries) {
    std::string error_field = "nan";
    try {
      auto ref_it = references.find(entry.reference);
      if (ref_it == references.end()) {
        ref_it = references.emplace(entry.reference, read_pgm(base / entry.reference)).first;
      }
      const TactileImage frame = read_pgm(base / entry.frame);
      const auto estimate =
          locate_contact(ref_it->second, frame, cfg.detection, cfg.intrinsics, cfg.geometry);
      if (!estimate) {
        io.err << "localize: no contact detected in " << entry.frame << '\n';
      } else {
        const double err = localization_error(*estimate, {entry.truth_mm, Region::Off});
        records.push_back({entry.object, entry.pose, err});
        error_field = fmt::format("{:.6f}", err);
      }
    } catch (const std::exception& e) {
      io.err << "localize: " << entry.frame << ": " << e.what() << '\n';
    }
    rows.push_back(fmt::format("{},{},{:.9g},{}", entry.object, to_string(entry.pose.kind),
                               entry.pose.value, error_field));
  }

  try {
    ensure_directory(out_dir);
    {
      const fs::path path = out_dir / "localization_errors.csv";
      std::ofstream out = open_output(path);
      out << "object,pose_kind,pose_value,error_mm\n";
      for (const std::string& row : rows) {
        out << row << '\n';
      }
      if (!out) {
        throw IoError(path, "write failed");
      }
    }
    if (records.empty()) {
      io.err << "localize: no entry could be localised\n";
      return 1;
    }
    const ErrorTables tables = aggregate_errors(records);
    write_group_table(out_dir / "errors_by_pose.csv", tables.by_pose, kHardwareErrorsByPose);
    write_group_table(out_dir / "errors_by_object.csv", tables.by_object, kHardwareErrorsByObject);

    double sum = 0.0;
    for (const ErrorRecord& r : records) {
      sum += r.error_mm;
    }
    const json summary = {{"entries", manifest.entries.size()},
                          {"localized", records.size()},
                          {"mean_error_mm", sum / static_cast<double>(records.size())},
                          {"errors_csv", (out_dir / "localization_errors.csv").string()},
                          {"by_pose_csv", (out_dir / "errors_by_pose.csv").string()},
                          {"by_object_csv", (out_dir / "errors_by_object.csv").string()}};
    io.out << summary.dump() << '\n';
    return 0;
  } catch (const std::exception& e) {
    io.err << "localize: " << e.what() << '\n';
    return 1;
  }
}

int cmd_calibrate(const SessionConfig& cfg, const fs::path& csv_path, CommandStreams io) {
  std::vector<Correspondence> cs;
  try {
    cs = read_correspondences_csv(csv_path);
  } catch (const std::exception& e) {
    io.err << "calibrate: " << e.what() << '\n';
    return 1;
  }
  if (cs.empty()) {
    io.err << "calibrate: " << csv_path.string() << " has no correspondences\n";
    return 1;
  }

  json result;
  try {
    result["single_point"] = {{"alpha_px", solve_alpha(cs.front(), cfg.intrinsics.cx_px,
                                                        cfg.intrinsics.cy_px)},
                              {"cx_px", cfg.intrinsics.cx_px},
                              {"cy_px", cfg.intrinsics.cy_px}};
  } catch (const std::exception& e) {
    io.err << "calibrate: single-point alpha: " << e.what() << '\n';
    return 1;
  }

  try {
    const CalibrationResult fit = fit_intrinsics(cs, cfg.intrinsics);
    result["fit"] = {{"alpha_px", fit.intrinsics.alpha_px},
                     {"cx_px", fit.intrinsics.cx_px},
                     {"cy_px", fit.intrinsics.cy_px},
                     {"rms_residual_px", fit.rms_residual_px},
                     {"per_point_residuals_px", fit.per_point_residuals_px},
                     {"iterations", fit.iterations}};
  } catch (const std::exception& e) {
    result["fit"] = nullptr;
    result["error"] = e.what();
    io.out << result.dump() << '\n';
    io.err << "calibrate: " << e.what() << '\n';
    return 1;
  }
  io.out << result.dump() << '\n';
  return 0;
}

namespace {

json metrics_json(const std::string& policy, const RunMetrics& m, std::uint64_t seed) {
  return {{"policy", policy},
          {"n_blocks", m.n_blocks},
          {"failure_rate", m.failure_rate},
          {"attempts_per_block", m.attempts_per_block},
          {"collisions_per_block", m.collisions_per_block},
          {"seed", seed}};
}

}  // namespace

int cmd_blocksworld(const SessionConfig& /*cfg*/, const std::string& policy, std::int64_t n_boards,
                    std::uint64_t seed, CommandStreams io) {
  if (n_boards < 1) {
    io.err << "blocksworld: number of boards must be >= 1\n";
    return 1;
  }
  try {
    if (policy != "all") {
      const Policy kind = policy_from_string(policy);
      io.out << metrics_json(to_string(kind), run_batch(kind, n_boards, seed), seed).dump() << '\n';
      return 0;
    }

    json runs = json::array();
    json oracle = json::array();
    std::string csv =
        "policy,failure_rate,attempts_per_block,collisions_per_block,"
        "exact_failure_rate,exact_attempts_per_block,exact_collisions_per_block,"
        "hardware_failure_rate,hardware_attempts_per_block,hardware_collisions_per_block\n";
    for (const GraspReference& hw : kHardwareGraspResults) {
      const RunMetrics sim = run_batch(hw.policy, n_boards, seed);
      const RunMetrics exact = exact_metrics(hw.policy);
      runs.push_back(metrics_json(to_string(hw.policy), sim, seed));
      oracle.push_back({{"policy", to_string(hw.policy)},
                        {"failure_rate", exact.failure_rate},
                        {"attempts_per_block", exact.attempts_per_block},
                        {"collisions_per_block", exact.collisions_per_block}});
      csv += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.2f},{:.2f},{:.2f}\n",
                         to_string(hw.policy), sim.failure_rate, sim.attempts_per_block,
                         sim.collisions_per_block, exact.failure_rate, exact.attempts_per_block,
                         exact.collisions_per_block, hw.failure_rate, hw.attempts_per_block,
                         hw.collisions_per_block);
    }
    io.out << json({{"runs", runs}, {"oracle", oracle}}).dump(2) << "\n\n" << csv;
    return 0;
  } catch (const std::exception& e) {
    io.err << "blocksworld: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace tipsense
