#pragma once

#include <cstdint>
#include <random>

namespace zerohit {

/// Sequential random source for i.i.d. sampling (samplers, replicates).
/// Brownian paths do not use this; they draw from keyed_normal.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::mt19937_64& engine() noexcept { return engine_; }
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace zerohit
