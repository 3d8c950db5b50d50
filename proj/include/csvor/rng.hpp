#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace csvor {

/// Deterministic random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The distributions are implemented here rather than taken from
/// <random> because the standard leaves their algorithms unspecified, and
/// result files must be byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Standard normal deviate (Marsaglia polar method).
  double normal();

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  /// k distinct indices from [0, n), in selection order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derive an independent child seed from a base seed and a list of keys.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys);

}  // namespace csvor
