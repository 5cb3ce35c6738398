#include "tipsense/blocksworld.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "tipsense/rng.hpp"

namespace tipsense {

std::string to_string(Policy p) {
  switch (p) {
    case Policy::Control:
      return "control";
    case Policy::Rg:
      return "rg";
    case Policy::RgTr:
      return "rgtr";
  }
  return "unknown";
}

Policy policy_from_string(const std::string& name) {
  for (Policy p : {Policy::Control, Policy::Rg, Policy::RgTr}) {
    if (to_string(p) == name) {
      return p;
    }
  }
  throw std::invalid_argument("unknown policy '" + name + "' (expected control, rg or rgtr)");
}

void BatchTotals::add(const BlockRecord& r) {
  ++n_blocks;
  failures += r.success ? 0 : 1;
  attempts += r.attempts;
  attempts_sq += static_cast<std::int64_t>(r.attempts) * r.attempts;
  collisions += r.collisions;
  collisions_sq += static_cast<std::int64_t>(r.collisions) * r.collisions;
}

BatchTotals& BatchTotals::operator+=(const BatchTotals& o) {
  n_blocks += o.n_blocks;
  failures += o.failures;
  attempts += o.attempts;
  attempts_sq += o.attempts_sq;
  collisions += o.collisions;
  collisions_sq += o.collisions_sq;
  return *this;
}

RunMetrics BatchTotals::metrics() const {
  RunMetrics m;
  m.n_blocks = n_blocks;
  if (n_blocks == 0) {
    return m;
  }
  const double n = static_cast<double>(n_blocks);
  m.failure_rate = failures / n;
  m.attempts_per_block = attempts / n;
  m.collisions_per_block = collisions / n;
  return m;
}

std::array<double, 3> BatchTotals::standard_errors() const {
  if (n_blocks < 2) {
    return {0.0, 0.0, 0.0};
  }
  const double n = static_cast<double>(n_blocks);
  auto se = [n](double sum, double sum_sq) {
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
    return std::sqrt(var / n);
  };
  // Failure is a 0/1 variable, so its sum of squares equals its sum.
  return {se(static_cast<double>(failures), static_cast<double>(failures)),
          se(static_cast<double>(attempts), static_cast<double>(attempts_sq)),
          se(static_cast<double>(collisions), static_cast<double>(collisions_sq))};
}

namespace {

int uniform_column(std::mt19937_64& rng) {
  return static_cast<int>(rng() >> 62);
}

}  // namespace

BoardState new_board(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BoardState board;
  for (int& c : board.block_col) {
    c = uniform_column(rng);
  }
  return board;
}

GraspOutcome attempt_grasp(const BoardState& board, int row, int col) {
  if (row < 0 || row >= kBoardSize || col < 0 || col >= kBoardSize) {
    throw std::out_of_range("grasp row/column outside the 4x4 board");
  }
  const int block = board.block_col[row];
  if (col == block) {
    return {GraspKind::Hit, std::nullopt};
  }
  if (std::abs(col - block) == 1) {
    return {GraspKind::Collision, block};
  }
  return {GraspKind::Miss, std::nullopt};
}

BlockRecord run_row(Policy kind, const BoardState& board, int row, int max_attempts,
                    const ColumnDraw& draw) {
  if (max_attempts < 1) {
    throw std::invalid_argument("max_attempts must be >= 1");
  }
  BlockRecord rec;
  if (kind == Policy::Control) {
    attempt_grasp(board, row, board.block_col[row]);
    rec.success = true;
    rec.attempts = 1;
    return rec;
  }
  std::optional<int> regrasp;
  while (rec.attempts < max_attempts) {
    const int col = regrasp ? *regrasp : draw();
    regrasp.reset();
    const GraspOutcome outcome = attempt_grasp(board, row, col);
    ++rec.attempts;
    if (outcome.kind == GraspKind::Hit) {
      rec.success = true;
      break;
    }
    if (outcome.kind == GraspKind::Collision) {
      ++rec.collisions;
      if (kind == Policy::RgTr) {
        regrasp = outcome.contact_col;
      }
    }
  }
  return rec;
}

std::array<BlockRecord, kBoardSize> run_policy(Policy kind, const BoardState& board,
                                               int max_attempts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ColumnDraw draw = [&rng] { return uniform_column(rng); };
  std::array<BlockRecord, kBoardSize> out;
  for (int row = 0; row < kBoardSize; ++row) {
    out[row] = run_row(kind, board, row, max_attempts, draw);
  }
  return out;
}

namespace {

void play_board(Policy kind, std::int64_t index, std::uint64_t seed, int max_attempts,
                BatchTotals& totals) {
  const auto i = static_cast<std::uint64_t>(index);
  const BoardState board = new_board(derive_seed(seed, 2 * i));
  for (const BlockRecord& rec : run_policy(kind, board, max_attempts, derive_seed(seed, 2 * i + 1))) {
    totals.add(rec);
  }
}

void check_batch_args(std::int64_t n_boards, int max_attempts) {
  if (n_boards < 1) {
    throw std::invalid_argument("n_boards must be >= 1");
  }
  if (max_attempts < 1) {
    throw std::invalid_argument("max_attempts must be >= 1");
  }
}

}  // namespace

BatchTotals run_batch_totals(Policy kind, std::int64_t n_boards, std::uint64_t seed,
                             int max_attempts) {
  check_batch_args(n_boards, max_attempts);
  BatchTotals totals;
#pragma omp parallel
  {
    BatchTotals local;
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < n_boards; ++b) {
      play_board(kind, b, seed, max_attempts, local);
    }
#pragma omp critical
    totals += local;
  }
  return totals;
}

RunMetrics run_batch(Policy kind, std::int64_t n_boards, std::uint64_t seed, int max_attempts) {
  return run_batch_totals(kind, n_boards, seed, max_attempts).metrics();
}

std::vector<RunMetrics> sample_batches(Policy kind, int n_batches, int boards_per_batch,
                                       std::uint64_t seed, int max_attempts) {
  check_batch_args(boards_per_batch, max_attempts);
  if (n_batches < 1) {
    throw std::invalid_argument("n_batches must be >= 1");
  }
  std::vector<RunMetrics> out(n_batches);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n_batches; ++j) {
    BatchTotals t;
    const std::uint64_t batch_seed = derive_seed(seed, static_cast<std::uint64_t>(j));
    for (int b = 0; b < boards_per_batch; ++b) {
      play_board(kind, b, batch_seed, max_attempts, t);
    }
    out[j] = t.metrics();
  }
  return out;
}

RunMetrics exact_metrics(Policy kind, int max_attempts) {
  if (max_attempts < 1) {
    throw std::invalid_argument("max_attempts must be >= 1");
  }
  RunMetrics m;
  if (kind == Policy::Control) {
    m.attempts_per_block = 1.0;
    return m;
  }
  for (int block = 0; block < kBoardSize; ++block) {
    const int adjacent = (block > 0 ? 1 : 0) + (block < kBoardSize - 1 ? 1 : 0);
    const double p_hit = 1.0 / kBoardSize;
    const double p_collide = static_cast<double>(adjacent) / kBoardSize;
    // Probability mass of still searching at random, or holding a sensed
    // column to regrasp, before the current attempt.
    double searching = 1.0;
    double regrasp = 0.0;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
      m.attempts_per_block += searching + regrasp;
      m.collisions_per_block += searching * p_collide;
      const double collided = searching * p_collide;
      const double missed = searching * (1.0 - p_hit - p_collide);
      // A regrasp always hits.
      if (kind == Policy::RgTr) {
        searching = missed;
        regrasp = collided;
      } else {
        searching = missed + collided;
        regrasp = 0.0;
      }
    }
    m.failure_rate += searching + regrasp;
  }
  m.failure_rate /= kBoardSize;
  m.attempts_per_block /= kBoardSize;
  m.collisions_per_block /= kBoardSize;
  return m;
}

namespace serial {

BatchTotals run_batch_totals(Policy kind, std::int64_t n_boards, std::uint64_t seed,
                             int max_attempts) {
  check_batch_args(n_boards, max_attempts);
  BatchTotals totals;
  for (std::int64_t b = 0; b < n_boards; ++b) {
    play_board(kind, b, seed, max_attempts, totals);
  }
  return totals;
}

}  // namespace serial

}  // namespace tipsense
