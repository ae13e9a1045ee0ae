#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace nll {

using Seed = std::uint64_t;

/// Mixes a 64-bit value through the splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Child seed for an independent stream identified by a purpose tag.
Seed derive_seed(Seed base, std::string_view tag) noexcept;
/// Child seed for an independent stream identified by integer coordinates
/// (cell indices, trial numbers, ...).
Seed derive_seed(Seed base, std::uint64_t a, std::uint64_t b = 0) noexcept;

/// Seeded generator with platform-independent variate generation.
///
/// The engine is mt19937_64 (output fully specified by the standard); the
/// uniform, normal and categorical transforms are implemented here rather
/// than through <random> distributions so the same seed yields the same
/// stream with every standard library.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(mix64(seed)) {}

  /// Independent generator for the given purpose; does not advance *this.
  static Rng stream(Seed seed, std::string_view tag) { return Rng(derive_seed(seed, tag)); }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal variate (Marsaglia polar method).
  double normal();

  /// Index drawn with probability proportional to `weights`.
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Fisher-Yates shuffle driven by `rng`.
template <class T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace nll
