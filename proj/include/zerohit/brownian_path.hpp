#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

namespace zerohit {

/// Identifies one Brownian driver. Equal seeds give bitwise-identical paths.
struct PathSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const PathSeed&, const PathSeed&) = default;
};

inline constexpr int kDefaultMaxLevel = 40;

/// Standard normal variate keyed by (seed, level, index). Pure function.
double keyed_normal(const PathSeed& seed, std::int64_t level,
                    std::uint64_t index) noexcept;

struct Extrema {
  double min = 0.0;
  double max = 0.0;
};

class BrownianPath;

/// Forward walker over the dyadic tree of a BrownianPath.
///
/// Time is measured in ticks of length base_horizon * 2^-max_level. The
/// cursor keeps the right endpoints of the pending dyadic intervals, so a step
/// of 2^e ticks costs O(1) bridge samples amortized. Every value it produces
/// equals BrownianPath::value_at_tick for the same tick.
class PathCursor {
 public:
  std::uint64_t tick() const noexcept { return tick_; }
  double value() const noexcept { return value_; }
  double time() const noexcept;

  /// Largest step (in ticks) that keeps the walk on the dyadic tree, limited
  /// to 2^max_exponent. Splits pending intervals as needed.
  std::uint64_t peek(int max_exponent);
  /// Like peek, but never past `end_tick` (which must lie beyond tick()).
  std::uint64_t peek_bounded(int max_exponent, std::uint64_t end_tick);
  /// Value at the point returned by the last peek, without moving.
  double peek_value() const noexcept { return pending_.back().value; }
  /// Moves to the point returned by the last peek.
  void commit();
  /// Largest step not beyond `end_tick`, then commit. Returns the step.
  std::uint64_t advance(int max_exponent, std::uint64_t end_tick);

 private:
  friend class BrownianPath;
  struct Node {
    std::uint64_t tick;
    double value;
  };
  PathCursor(PathSeed seed, double tick_length, int max_level)
      : seed_(seed), tick_length_(tick_length), max_level_(max_level) {}
  void push_next_root();
  void split();

  PathSeed seed_;
  double tick_length_;
  int max_level_;
  std::uint64_t tick_ = 0;
  double value_ = 0.0;
  std::vector<Node> pending_;
};

/// One Brownian motion on [0, horizon], lazily refined by Brownian-bridge
/// midpoint sampling.
///
/// The point k * base_horizon * 2^-level (k odd) draws its bridge variate from
/// keyed_normal(seed, level, k), so values never depend on query order. Points
/// base_horizon * 2^j are unconditional increments from the previous such
/// point; this is what lets `extended` grow the window without disturbing any
/// stored value. Copies share one memo cache, which is internally locked.
class BrownianPath {
 public:
  BrownianPath(PathSeed seed, double horizon, int max_level = kDefaultMaxLevel);

  const PathSeed& seed() const noexcept { return seed_; }
  double horizon() const noexcept { return horizon_; }
  double base_horizon() const noexcept { return base_horizon_; }
  int max_level() const noexcept { return max_level_; }
  double tick_length() const noexcept { return tick_length_; }
  std::uint64_t horizon_ticks() const noexcept { return horizon_ticks_; }

  /// Same path on a window doubled until it covers `t`.
  BrownianPath extended_to(double t) const;

  /// B_t for t a dyadic point of `level` (relative to the base horizon).
  double value_at(double t, int level) const;
  double value_at_tick(std::uint64_t tick) const;

  /// Running min/max of the level-`level` samples on [s, t]. A lower bound on
  /// the oscillation of the continuous path.
  Extrema oscillation(double s, double t, int level) const;

  /// Walker positioned at `tick` (any tick, not only horizon-bounded ones).
  PathCursor cursor_at(std::uint64_t tick) const;

  std::uint64_t tick_of(double t) const;
  /// Nearest tick at or above t.
  std::uint64_t ceil_tick(double t) const;
  double time_of(std::uint64_t tick) const noexcept {
    return static_cast<double>(tick) * tick_length_;
  }

  /// Finest level reached by value_at / oscillation queries so far.
  int max_level_touched() const;
  /// Memoized samples, sorted by tick.
  std::vector<std::pair<std::uint64_t, double>> stored_samples() const;

 private:
  struct Cache;

  PathSeed seed_;
  double base_horizon_;
  double horizon_;
  int max_level_;
  double tick_length_;
  std::uint64_t horizon_ticks_;
  std::shared_ptr<Cache> cache_;
};

/// Binary dump: magic, master_seed, stream_id, horizon, base horizon,
/// max_level, dump level, sample count, then level-ordered 64-bit floats
/// (level 0 endpoints first, then the odd multiples of each finer level).
void write_path_dump(std::ostream& out, const BrownianPath& path, int level);

struct PathDump {
  PathSeed seed;
  double horizon = 0.0;
  double base_horizon = 0.0;
  int max_level = 0;
  int level = 0;
  std::vector<double> values;
};

PathDump read_path_dump(std::istream& in);

/// Rebuilds the path named by a dump and checks every dumped value against
/// it. Throws std::runtime_error on any mismatch.
BrownianPath replay_path_dump(const PathDump& dump);

}  // namespace zerohit
