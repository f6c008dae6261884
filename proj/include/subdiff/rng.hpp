#ifndef SUBDIFF_RNG_HPP
#define SUBDIFF_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace subdiff {

/// Splittable random generator.  Every stochastic API takes an explicit seed
/// or a SplitRng; there is no global state.  child(k) derives an independent
/// stream from the *root* seed, so per-task streams do not depend on how many
/// draws the parent has consumed -- results are reproducible under any
/// parallel schedule.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : seed_(seed), engine_(scramble(seed)) {}

  /// Independent substream k of this generator's root seed.
  SplitRng child(std::uint64_t k) const { return SplitRng(mix(seed_, k)); }

  std::uint64_t root_seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal (Box-Muller, spare value cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * uniform();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  /// Gamma(shape, scale=1), Marsaglia-Tsang.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u > 0 ? u : 0x1.0p-53, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi_squared(double df) { return 2.0 * gamma(0.5 * df); }

  /// Index in [0, n) with probability proportional to weights[i] (weights
  /// need not be normalized; cumulative scan order is fixed).
  template <class Vec>
  std::size_t categorical(const Vec& weights) {
    double total = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(weights.size()); ++i) total += weights[i];
    double u = uniform() * total;
    for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(weights.size()); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return static_cast<std::size_t>(weights.size()) - 1;
  }

 private:
  static std::uint64_t splitmix(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t scramble(std::uint64_t s) {
    std::uint64_t x = s;
    return splitmix(x);
  }

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed;
    const std::uint64_t a = splitmix(x);
    x = a ^ (stream * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL);
    std::uint64_t out = splitmix(x);
    splitmix(x);
    return out ^ x;
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace subdiff

#endif  // SUBDIFF_RNG_HPP
