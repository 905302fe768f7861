#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <random>
#include <utility>
#include <vector>

namespace lad {

/// Deterministic random stream: identical seed and call sequence give
/// identical values on every platform. Uniform, normal and bounded draws
/// are derived directly from the raw mt19937_64 output instead of the
/// std::*_distribution adaptors, whose algorithms differ between standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; consumes two draws per pair.
  double normal();

  /// Unbiased draw in [0, n), n >= 1, by rejection.
  std::uint64_t bounded(std::uint64_t n);

  /// Derives an independent stream for a named purpose; advances this
  /// stream by one draw.
  Rng fork(std::string_view tag);

  /// Fisher-Yates shuffle driven by this stream.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[bounded(i)]);
    }
  }

  /// State round-trip for checkpoints.
  std::string serialize() const;
  static Rng deserialize(const std::string& text);

  bool operator==(const Rng& other) const {
    return engine_ == other.engine_ && has_spare_ == other.has_spare_ &&
           (!has_spare_ || spare_ == other.spare_);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lad
