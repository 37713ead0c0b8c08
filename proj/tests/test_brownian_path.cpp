#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "zerohit/brownian_path.hpp"

using namespace zerohit;

TEST_CASE("path starts at zero and is deterministic") {
  const BrownianPath a({42, 0}, 1.0);
  const BrownianPath b({42, 0}, 1.0);
  CHECK(a.value_at(0.0, 0) == 0.0);
  CHECK(a.value_at(0.0, 17) == 0.0);
  for (double t : {1.0, 0.5, 0.25, 0.8125}) {
    CHECK(a.value_at(t, 10) == b.value_at(t, 10));
  }
  const BrownianPath other({42, 1}, 1.0);
  CHECK(a.value_at(1.0, 0) != other.value_at(1.0, 0));
}

TEST_CASE("rejects bad horizons and queries") {
  CHECK_THROWS(BrownianPath({1, 0}, 0.0));
  CHECK_THROWS(BrownianPath({1, 0}, -1.0));
  const BrownianPath p({1, 0}, 1.0);
  CHECK_THROWS(p.value_at(1.5, 1));
  CHECK_THROWS(p.value_at(-0.5, 1));
  CHECK_THROWS(p.value_at(0.3, 4));
  CHECK_THROWS(p.value_at(0.5, kDefaultMaxLevel + 1));
  CHECK_THROWS(p.oscillation(0.6, 0.5, 4));
}

TEST_CASE("refinement never changes stored values") {
  const BrownianPath a({3, 9}, 1.0);
  const double coarse = a.value_at(0.5, 1);
  for (int level = 2; level <= 20; ++level) a.value_at(0.5 + std::ldexp(1.0, -level), level);
  CHECK(a.value_at(0.5, 5) == coarse);

  const BrownianPath b({3, 9}, 1.0);
  CHECK(b.value_at(0.5, 5) == coarse);
}

TEST_CASE("query order does not matter") {
  std::vector<double> times;
  for (int k = 0; k <= 64; ++k) times.push_back(k / 64.0);
  std::mt19937 shuffle_rng(5);
  std::vector<double> shuffled = times;
  std::shuffle(shuffled.begin(), shuffled.end(), shuffle_rng);

  const BrownianPath a({8, 2}, 1.0);
  const BrownianPath b({8, 2}, 1.0);
  for (double t : times) a.value_at(t, 6);
  for (double t : shuffled) b.value_at(t, 6);
  CHECK(a.stored_samples() == b.stored_samples());
}

TEST_CASE("concurrent queries see the same values") {
  const BrownianPath shared({11, 4}, 1.0);
  std::vector<double> seen(8 * 128);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < 8; ++w) {
      pool.emplace_back([&, w] {
        for (int k = 0; k < 128; ++k) {
          const int idx = (k * 37 + w * 11) % 128;
          seen[w * 128 + idx] = shared.value_at(idx / 128.0, 7);
        }
      });
    }
  }
  const BrownianPath fresh({11, 4}, 1.0);
  for (int w = 0; w < 8; ++w) {
    for (int k = 0; k < 128; ++k) CHECK(seen[w * 128 + k] == fresh.value_at(k / 128.0, 7));
  }
}

TEST_CASE("cursor agrees with value_at") {
  const BrownianPath p({5, 5}, 1.0);
  PathCursor c = p.cursor_at(0);
  const std::uint64_t end = p.horizon_ticks();
  int steps = 0;
  while (c.tick() < end) {
    c.advance(p.max_level() - 9, end);
    if (++steps % 37 == 0) CHECK(c.value() == p.value_at_tick(c.tick()));
  }
  CHECK(c.value() == p.value_at(1.0, 0));
  const std::uint64_t mid = p.tick_of(0.6875);
  CHECK(p.cursor_at(mid).value() == p.value_at(0.6875, 4));
}

TEST_CASE("extension keeps the original window") {
  const BrownianPath p({2, 7}, 1.0);
  const BrownianPath q = p.extended_to(5.0);
  CHECK(q.horizon() == 8.0);
  CHECK(q.value_at(0.75, 2) == p.value_at(0.75, 2));
  CHECK(q.value_at(1.0, 0) == p.value_at(1.0, 0));
  CHECK_NOTHROW(q.value_at(6.5, 1));
}

TEST_CASE("bridge midpoints have the right conditional law") {
  // Standardized midpoint residuals at levels 1..10 should be N(0, 1).
  double sum = 0.0;
  double sum2 = 0.0;
  double sum4 = 0.0;
  std::size_t n = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const BrownianPath p({77, s}, 1.0);
    for (int level = 1; level <= 9; ++level) {
      const double h = std::ldexp(1.0, -level);
      for (double t = h; t < 1.0; t += 2.0 * h) {
        const double mid = p.value_at(t, level);
        const double u = p.value_at(t - h, level - 1);
        const double v = p.value_at(t + h, level - 1);
        const double z = (mid - 0.5 * (u + v)) / std::sqrt(h / 2.0);
        sum += z;
        sum2 += z * z;
        sum4 += z * z * z * z;
        ++n;
      }
    }
  }
  const double dn = static_cast<double>(n);
  const double mean = sum / dn;
  const double var = sum2 / dn;
  const double kurt = sum4 / dn;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(dn));
  CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / dn));
  CHECK(std::abs(kurt - 3.0) < 3.0 * std::sqrt(96.0 / dn));
}

TEST_CASE("increments have mean 0 and variance h") {
  const BrownianPath p({123, 0}, 1.0);
  const int level = 14;
  const double h = std::ldexp(1.0, -level);
  PathCursor c = p.cursor_at(0);
  double prev = 0.0;
  double sum = 0.0;
  double sum2 = 0.0;
  const std::size_t n = std::size_t{1} << level;
  for (std::size_t k = 0; k < n; ++k) {
    c.advance(p.max_level() - level, p.horizon_ticks());
    const double d = c.value() - prev;
    prev = c.value();
    sum += d;
    sum2 += d * d;
  }
  const double dn = static_cast<double>(n);
  CHECK(std::abs(sum / dn) < 4.0 * std::sqrt(h / dn));
  CHECK(std::abs(sum2 / dn - h) < 4.0 * h * std::sqrt(2.0 / dn));
}

TEST_CASE("streams are independent and B(1) has unit variance") {
  const std::size_t n = 10000;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = BrownianPath({9, 2 * i}, 1.0).value_at(1.0, 0);
    const double y = BrownianPath({9, 2 * i + 1}, 1.0).value_at(1.0, 0);
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  const double corr = sxy / std::sqrt(sxx * syy);
  CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(sxx / n - 1.0) < 0.05);
}

TEST_CASE("scaling: horizon H at time Ht over sqrt(H) looks standard") {
  const std::size_t n = 4000;
  double s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const BrownianPath p({31, i}, 4.0);
    const double v = p.value_at(2.0, 1) / 2.0;
    s2 += v * v;
  }
  // Var B_{1/2} = 1/2.
  CHECK(std::abs(s2 / n - 0.5) < 3.0 * 0.5 * std::sqrt(2.0 / n));
}

TEST_CASE("oscillation") {
  const BrownianPath p({4, 4}, 1.0);
  const Extrema point = p.oscillation(0.5, 0.5, 5);
  CHECK(point.min == p.value_at(0.5, 1));
  CHECK(point.max == point.min);

  const Extrema coarse = p.oscillation(0.0, 1.0, 6);
  const Extrema fine = p.oscillation(0.0, 1.0, 12);
  CHECK(fine.min <= coarse.min);
  CHECK(fine.max >= coarse.max);

  // Mean range against the Brownian range expectation. A level-12 grid
  // undershoots the continuous range by about 1%.
  const std::size_t reps = 10000;
  double total = 0.0;
  for (std::size_t i = 0; i < reps; ++i) {
    const Extrema e = BrownianPath({6, i}, 1.0).oscillation(0.0, 1.0, 12);
    total += e.max - e.min;
  }
  const double ratio = total / reps / oracle::expected_bm_range();
  CHECK(ratio < 1.0);
  CHECK(ratio > 0.95);
}

TEST_CASE("path dumps replay and detect tampering") {
  const BrownianPath p({21, 3}, 2.0);
  std::stringstream buf;
  write_path_dump(buf, p, 6);
  PathDump d = read_path_dump(buf);
  CHECK(d.seed == PathSeed{21, 3});
  CHECK(d.level == 6);
  CHECK(d.values.size() == 2 + 63);
  const BrownianPath q = replay_path_dump(d);
  CHECK(q.value_at(1.25, 3) == p.value_at(1.25, 3));
  d.values[5] += 1e-12;
  CHECK_THROWS_AS(replay_path_dump(d), std::runtime_error);

  std::stringstream junk("not a dump");
  CHECK_THROWS(read_path_dump(junk));
}
