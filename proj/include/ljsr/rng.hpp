#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "ljsr/core.hpp"

namespace ljsr {

/// Seeded random stream. All randomness in the library flows through this
/// class so that a single integer seed fully determines every output.
/// Gaussians use the Box-Muller transform on 53-bit uniforms (documented,
/// engine-independent apart from the mt19937_64 stream itself).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Independent substream for (seed, stream); used to split noise/trial
  /// streams so parallel and serial execution agree.
  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix(mix(0x9e3779b97f4a7c15ULL ^ seed) + stream));
  }

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller; pairs are cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(6.283185307179586476925286766559 * u2);
    have_spare_ = true;
    return mag * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Circularly-symmetric complex normal with E|z|^2 = 1.
  Complex cgaussian() {
    const double s = 0.7071067811865475244;  // 1/sqrt(2)
    return Complex(s * gaussian(), s * gaussian());
  }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_u64() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

  /// k distinct indices drawn from 0..n-1, returned sorted.
  std::vector<int> sample_indices(int n, int k) {
    if (k < 0 || k > n) throw std::invalid_argument("sample_indices: k out of range");
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    shuffle(all);
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
  }

  /// rows x cols complex Gaussian matrix, entries cgaussian() * scale,
  /// filled column by column.
  MatC cgaussian_matrix(Index rows, Index cols, double scale = 1.0) {
    MatC m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = scale * cgaussian();
    return m;
  }

  VecC cgaussian_vector(Index size, double scale = 1.0) {
    VecC v(size);
    for (Index i = 0; i < size; ++i) v[i] = scale * cgaussian();
    return v;
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ljsr
