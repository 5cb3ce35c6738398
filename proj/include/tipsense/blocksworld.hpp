#pragma once

// Blocks World grasping: a 4x4 board with one block per row in an unknown
// column. A grasp in the block's column hits; one column off collides with
// the block (the finger senses it, which reveals the block's column);
// anything else misses. Each block gets at most `max_attempts` grasps.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tipsense {

inline constexpr int kBoardSize = 4;

struct BoardState {
  std::array<int, kBoardSize> block_col{};
  friend bool operator==(const BoardState&, const BoardState&) = default;
};

enum class GraspKind { Hit, Collision, Miss };

struct GraspOutcome {
  GraspKind kind = GraspKind::Miss;
  std::optional<int> contact_col;  // set iff kind == Collision
};

enum class Policy { Control, Rg, RgTr };

std::string to_string(Policy p);
Policy policy_from_string(const std::string& name);

struct BlockRecord {
  bool success = false;
  int attempts = 0;
  int collisions = 0;
};

struct RunMetrics {
  double failure_rate = 0.0;
  double attempts_per_block = 0.0;
  double collisions_per_block = 0.0;
  std::int64_t n_blocks = 0;
};

// Integer tallies over a batch; exact and independent of reduction order.
struct BatchTotals {
  std::int64_t n_blocks = 0;
  std::int64_t failures = 0;
  std::int64_t attempts = 0;
  std::int64_t attempts_sq = 0;
  std::int64_t collisions = 0;
  std::int64_t collisions_sq = 0;

  void add(const BlockRecord& r);
  BatchTotals& operator+=(const BatchTotals& o);
  RunMetrics metrics() const;
  // Standard errors of the three per-block means (failure, attempts, collisions).
  std::array<double, 3> standard_errors() const;
  friend bool operator==(const BatchTotals&, const BatchTotals&) = default;
};

// Uniform random column in [0, 4) from the top two bits of a 64-bit draw.
BoardState new_board(std::uint64_t seed);

// Throws std::out_of_range for indices outside the board.
GraspOutcome attempt_grasp(const BoardState& board, int row, int col);

// Source of random grasp columns; each call returns a column in [0, 4).
using ColumnDraw = std::function<int()>;

// Plays one row. Control grasps the block directly; Rg draws every attempt;
// RgTr draws until a collision and then grasps the sensed column.
BlockRecord run_row(Policy kind, const BoardState& board, int row, int max_attempts,
                    const ColumnDraw& draw);

std::array<BlockRecord, kBoardSize> run_policy(Policy kind, const BoardState& board,
                                               int max_attempts, std::uint64_t seed);

// Board i uses new_board(derive_seed(seed, 2i)) and policy seed
// derive_seed(seed, 2i + 1).
BatchTotals run_batch_totals(Policy kind, std::int64_t n_boards, std::uint64_t seed,
                             int max_attempts = 5);
RunMetrics run_batch(Policy kind, std::int64_t n_boards, std::uint64_t seed, int max_attempts = 5);

// Metrics of `n_batches` independent batches of `boards_per_batch` boards.
std::vector<RunMetrics> sample_batches(Policy kind, int n_batches, int boards_per_batch,
                                       std::uint64_t seed, int max_attempts = 5);

// Exact expectations from the per-row Markov chain over (attempt index,
// searching / regrasp-pending / done), averaged over the four block columns.
RunMetrics exact_metrics(Policy kind, int max_attempts = 5);

namespace serial {
BatchTotals run_batch_totals(Policy kind, std::int64_t n_boards, std::uint64_t seed,
                             int max_attempts = 5);
}  // namespace serial

// Published 5-board results, for plausibility checks and reports.
struct GraspReference {
  Policy policy;
  double failure_rate;
  double attempts_per_block;
  double collisions_per_block;
};

inline constexpr GraspReference kHardwareGraspResults[] = {
    {Policy::Control, 0.00, 1.00, 0.00},
    {Policy::Rg, 0.20, 3.30, 1.45},
    {Policy::RgTr, 0.00, 1.85, 0.55},
};

}  // namespace tipsense
