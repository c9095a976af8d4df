#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace textgcn {

/// Seedable generator with a fixed, documented algorithm so that splits,
/// initializations and synthetic data are reproducible across platforms.
///
/// Engine: std::mt19937_64 seeded with the 64-bit seed (its output sequence
/// is fixed by the C++ standard). Derived draws avoid the standard library
/// distributions, whose algorithms are implementation-defined:
///   - uniform01: top 53 bits of one engine output times 2^-53, in [0, 1)
///   - below(n): rejection sampling on full 64-bit outputs, unbiased
///   - normal: Box-Muller, sqrt(-2 ln(1 - u1)) * cos(2 pi u2), one value per call
///   - shuffle: Fisher-Yates from the last element down, j = below(i + 1)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::uint64_t below(std::uint64_t n);
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for one (budget, repeat) cell: base ^ mix64(mix64(budget) ^ repeat).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t budget, std::uint64_t repeat);

}  // namespace textgcn
