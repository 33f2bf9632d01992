#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace mrif {

/// xoshiro256** seeded through splitmix64.
///
/// Every randomized operation in the library draws from this generator and
/// never from <random> distributions, whose output is implementation-defined.
/// Independent streams are derived from (seed, tag) so that the order in which
/// modules consume randomness does not couple their results.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Stream keyed by a seed and a stable label, e.g. derive(seed, "ues").
  static Rng derive(std::uint64_t seed, std::string_view tag,
                    std::uint64_t index = 0);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via the Box-Muller transform (second variate cached).
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace mrif
