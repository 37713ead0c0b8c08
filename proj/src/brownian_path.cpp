#include "zerohit/brownian_path.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace zerohit {

namespace {

constexpr std::uint64_t splitmix(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr char kDumpMagic[8] = {'Z', 'H', 'P', 'A', 'T', 'H', '0', '1'};

// Tick indices must stay below 2^62 so that 2 * tick never overflows.
constexpr std::uint64_t kTickLimit = std::uint64_t{1} << 62;

double normal_for_tick(const PathSeed& seed, int max_level,
                       std::uint64_t tick) noexcept {
  const int tz = std::countr_zero(tick);
  return keyed_normal(seed, static_cast<std::int64_t>(max_level) - tz,
                      tick >> tz);
}

}  // namespace

double keyed_normal(const PathSeed& seed, std::int64_t level,
                    std::uint64_t index) noexcept {
  std::uint64_t h = splitmix(seed.master_seed);
  h = splitmix(h ^ seed.stream_id);
  h = splitmix(h ^ static_cast<std::uint64_t>(level));
  h = splitmix(h ^ index);
  const std::uint64_t h2 = splitmix(h);
  // u1 in (0, 1], u2 in [0, 1)
  const double u1 = static_cast<double>((h >> 11) + 1) * 0x1p-53;
  const double u2 = static_cast<double>(h2 >> 11) * 0x1p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// ---------------------------------------------------------------------------
// PathCursor

double PathCursor::time() const noexcept {
  return static_cast<double>(tick_) * tick_length_;
}

void PathCursor::push_next_root() {
  const std::uint64_t root = std::uint64_t{1} << max_level_;
  if (tick_ == 0) {
    const double sd = std::sqrt(static_cast<double>(root) * tick_length_);
    pending_.push_back({root, sd * normal_for_tick(seed_, max_level_, root)});
    return;
  }
  if (tick_ >= kTickLimit) {
    throw std::overflow_error("PathCursor: path extension limit reached");
  }
  const std::uint64_t next = 2 * tick_;
  const double sd = std::sqrt(static_cast<double>(tick_) * tick_length_);
  pending_.push_back(
      {next, value_ + sd * normal_for_tick(seed_, max_level_, next)});
}

void PathCursor::split() {
  const Node& right = pending_.back();
  const std::uint64_t half = (right.tick - tick_) / 2;
  const std::uint64_t mid = tick_ + half;
  const double sd = std::sqrt(0.5 * static_cast<double>(half) * tick_length_);
  const double v = 0.5 * (value_ + right.value) +
                   sd * normal_for_tick(seed_, max_level_, mid);
  pending_.push_back({mid, v});
}

std::uint64_t PathCursor::peek(int max_exponent) {
  if (pending_.empty()) push_next_root();
  const std::uint64_t limit = std::uint64_t{1}
                              << std::clamp(max_exponent, 0, 62);
  while (pending_.back().tick - tick_ > limit) split();
  return pending_.back().tick - tick_;
}

void PathCursor::commit() {
  tick_ = pending_.back().tick;
  value_ = pending_.back().value;
  pending_.pop_back();
}

std::uint64_t PathCursor::peek_bounded(int max_exponent,
                                       std::uint64_t end_tick) {
  std::uint64_t step = peek(max_exponent);
  while (tick_ + step > end_tick) {
    split();
    step = pending_.back().tick - tick_;
  }
  return step;
}

std::uint64_t PathCursor::advance(int max_exponent, std::uint64_t end_tick) {
  const std::uint64_t step = peek_bounded(max_exponent, end_tick);
  commit();
  return step;
}

// ---------------------------------------------------------------------------
// BrownianPath

struct BrownianPath::Cache {
  mutable std::shared_mutex mutex;
  std::unordered_map<std::uint64_t, double> values;
  int max_level_touched = 0;
};

BrownianPath::BrownianPath(PathSeed seed, double horizon, int max_level)
    : seed_(seed),
      base_horizon_(horizon),
      horizon_(horizon),
      max_level_(max_level),
      cache_(std::make_shared<Cache>()) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("BrownianPath: horizon must be positive");
  }
  if (max_level < 1 || max_level > 52) {
    throw std::invalid_argument("BrownianPath: max_level must be in [1, 52]");
  }
  tick_length_ = std::ldexp(horizon, -max_level);
  horizon_ticks_ = std::uint64_t{1} << max_level;
}

BrownianPath BrownianPath::extended_to(double t) const {
  BrownianPath out = *this;
  while (out.horizon_ < t) {
    if (out.horizon_ticks_ >= kTickLimit) {
      throw std::overflow_error("BrownianPath: cannot extend beyond 2^62 ticks");
    }
    out.horizon_ticks_ *= 2;
    out.horizon_ *= 2.0;
  }
  return out;
}

std::uint64_t BrownianPath::tick_of(double t) const {
  if (!(t >= 0.0) || t > horizon_) {
    throw std::out_of_range("BrownianPath: time " + std::to_string(t) +
                            " outside [0, horizon]");
  }
  const double k = t / tick_length_;
  if (k != std::floor(k)) {
    throw std::invalid_argument("BrownianPath: time is not on the tick grid");
  }
  return static_cast<std::uint64_t>(k);
}

std::uint64_t BrownianPath::ceil_tick(double t) const {
  if (!(t >= 0.0)) {
    throw std::out_of_range("BrownianPath: negative time");
  }
  const double k = std::ceil(t / tick_length_);
  if (k >= static_cast<double>(kTickLimit)) {
    throw std::out_of_range("BrownianPath: time beyond extension limit");
  }
  return static_cast<std::uint64_t>(k);
}

PathCursor BrownianPath::cursor_at(std::uint64_t tick) const {
  PathCursor c(seed_, tick_length_, max_level_);
  if (tick == 0) return c;
  if (tick >= kTickLimit) {
    throw std::out_of_range("BrownianPath: tick beyond extension limit");
  }
  // Walk the root chain 0, 2^L, 2^(L+1), ... up to the root interval
  // containing `tick`, then descend by bisection.
  while (true) {
    c.peek(62);
    const std::uint64_t next = c.pending_.back().tick;
    if (next > tick) break;
    c.commit();
    if (next == tick) return c;
  }
  while (c.tick_ != tick) {
    c.split();
    const std::uint64_t mid = c.pending_.back().tick;
    if (tick >= mid) c.commit();
  }
  return c;
}

double BrownianPath::value_at_tick(std::uint64_t tick) const {
  {
    std::shared_lock lock(cache_->mutex);
    auto it = cache_->values.find(tick);
    if (it != cache_->values.end()) return it->second;
  }
  const double v = cursor_at(tick).value();
  std::unique_lock lock(cache_->mutex);
  cache_->values.emplace(tick, v);
  if (tick != 0) {
    const int level = max_level_ - std::countr_zero(tick);
    cache_->max_level_touched = std::max(cache_->max_level_touched, level);
  }
  return v;
}

double BrownianPath::value_at(double t, int level) const {
  if (level > max_level_) {
    throw std::out_of_range("BrownianPath: level " + std::to_string(level) +
                            " beyond resolution floor " +
                            std::to_string(max_level_));
  }
  if (!(t >= 0.0) || t > horizon_) {
    throw std::out_of_range("BrownianPath: time " + std::to_string(t) +
                            " outside [0, horizon]");
  }
  const double k = std::ldexp(t / base_horizon_, level);
  if (k != std::floor(k)) {
    throw std::invalid_argument("BrownianPath: time " + std::to_string(t) +
                                " is not dyadic at level " +
                                std::to_string(level));
  }
  return value_at_tick(tick_of(t));
}

Extrema BrownianPath::oscillation(double s, double t, int level) const {
  if (t < s) throw std::invalid_argument("BrownianPath: reversed interval");
  if (level > max_level_) {
    throw std::out_of_range("BrownianPath: level beyond resolution floor");
  }
  if (s < 0.0 || t > horizon_) {
    throw std::out_of_range("BrownianPath: interval outside [0, horizon]");
  }
  const std::uint64_t start = ceil_tick(s);
  const std::uint64_t end =
      std::min(static_cast<std::uint64_t>(std::floor(t / tick_length_)),
               horizon_ticks_);
  if (start > end) {
    // No grid point inside; fall back to the nearest tick at or after s.
    const double v = value_at_tick(start);
    return {v, v};
  }
  PathCursor c = cursor_at(start);
  Extrema e{c.value(), c.value()};
  const int exponent = max_level_ - std::max(level, 0);
  while (c.tick() < end) {
    c.advance(exponent, end);
    e.min = std::min(e.min, c.value());
    e.max = std::max(e.max, c.value());
  }
  {
    std::unique_lock lock(cache_->mutex);
    cache_->max_level_touched = std::max(cache_->max_level_touched, level);
  }
  return e;
}

int BrownianPath::max_level_touched() const {
  std::shared_lock lock(cache_->mutex);
  return cache_->max_level_touched;
}

std::vector<std::pair<std::uint64_t, double>> BrownianPath::stored_samples()
    const {
  std::vector<std::pair<std::uint64_t, double>> out;
  {
    std::shared_lock lock(cache_->mutex);
    out.assign(cache_->values.begin(), cache_->values.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Binary dumps

namespace {

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("path dump: truncated input");
  return v;
}

// Level-ordered tick list for a dump: the level <= 0 points first, then odd
// multiples of each finer level.
std::vector<std::uint64_t> dump_ticks(std::uint64_t horizon_ticks,
                                      int max_level, int level) {
  std::vector<std::uint64_t> ticks;
  const std::uint64_t root = std::uint64_t{1} << max_level;
  for (std::uint64_t t = 0; t <= horizon_ticks; t += root) ticks.push_back(t);
  for (int l = 1; l <= level; ++l) {
    const std::uint64_t stride = std::uint64_t{1} << (max_level - l);
    for (std::uint64_t t = stride; t < horizon_ticks; t += 2 * stride) {
      ticks.push_back(t);
    }
  }
  return ticks;
}

}  // namespace

void write_path_dump(std::ostream& out, const BrownianPath& path, int level) {
  if (level < 0 || level > path.max_level()) {
    throw std::out_of_range("write_path_dump: level out of range");
  }
  const auto ticks = dump_ticks(path.horizon_ticks(), path.max_level(), level);
  out.write(kDumpMagic, sizeof(kDumpMagic));
  put(out, path.seed().master_seed);
  put(out, path.seed().stream_id);
  put(out, path.horizon());
  put(out, path.base_horizon());
  put(out, static_cast<std::int32_t>(path.max_level()));
  put(out, static_cast<std::int32_t>(level));
  put(out, static_cast<std::uint64_t>(ticks.size()));
  for (std::uint64_t t : ticks) put(out, path.value_at_tick(t));
  if (!out) throw std::runtime_error("write_path_dump: write failed");
}

PathDump read_path_dump(std::istream& in) {
  char magic[sizeof(kDumpMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kDumpMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("path dump: bad magic");
  }
  PathDump d;
  d.seed.master_seed = get<std::uint64_t>(in);
  d.seed.stream_id = get<std::uint64_t>(in);
  d.horizon = get<double>(in);
  d.base_horizon = get<double>(in);
  d.max_level = get<std::int32_t>(in);
  d.level = get<std::int32_t>(in);
  const auto n = get<std::uint64_t>(in);
  if (n > (std::uint64_t{1} << 32)) {
    throw std::runtime_error("path dump: implausible sample count");
  }
  d.values.resize(n);
  for (auto& v : d.values) v = get<double>(in);
  return d;
}

BrownianPath replay_path_dump(const PathDump& dump) {
  BrownianPath path =
      BrownianPath(dump.seed, dump.base_horizon, dump.max_level)
          .extended_to(dump.horizon);
  const auto ticks =
      dump_ticks(path.horizon_ticks(), path.max_level(), dump.level);
  if (ticks.size() != dump.values.size()) {
    throw std::runtime_error("path dump: sample count does not match header");
  }
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    if (path.value_at_tick(ticks[i]) != dump.values[i]) {
      throw std::runtime_error("path dump: value mismatch at sample " +
                               std::to_string(i));
    }
  }
  return path;
}

}  // namespace zerohit
