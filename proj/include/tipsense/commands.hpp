#pragma once

// Command implementations behind the `tipsense` executable. Each returns the
// process exit status and writes only to the given streams and to files under
// the paths it is handed, so the same functions serve the CLI and the tests.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "tipsense/config.hpp"

namespace tipsense {

struct CommandStreams {
  std::ostream& out;
  std::ostream& err;
};

// Writes reference.pgm and <object>_<pose_kind>_<pose_value>.pgm into out_dir
// and prints the ground-truth contact as JSON.
int cmd_render(const SessionConfig& cfg, const std::string& object, const ContactPose& pose,
               const std::filesystem::path& out_dir, CommandStreams io);

// Renders the 56-frame protocol dataset and prints the manifest path.
int cmd_dataset(const SessionConfig& cfg, const std::filesystem::path& out_dir, double noise_sigma,
                std::uint64_t seed, CommandStreams io);

// Localises every manifest entry. Writes localization_errors.csv,
// errors_by_pose.csv and errors_by_object.csv into out_dir and prints a JSON
// summary. Entries that fail produce `nan` rows; the exit status is nonzero
// only when nothing could be localised.
int cmd_localize(const SessionConfig& cfg, const std::filesystem::path& manifest_path,
                 const std::filesystem::path& out_dir, CommandStreams io);

// Single-point alpha from the first row (principal point from the config) and
// the joint (alpha, cx, cy) fit, printed as JSON.
int cmd_calibrate(const SessionConfig& cfg, const std::filesystem::path& csv_path,
                  CommandStreams io);

// policy is control, rg, rgtr or all. `all` adds the exact expectations and a
// CSV comparison against the published 5-board results.
int cmd_blocksworld(const SessionConfig& cfg, const std::string& policy, std::int64_t n_boards,
                    std::uint64_t seed, CommandStreams io);

}  // namespace tipsense
