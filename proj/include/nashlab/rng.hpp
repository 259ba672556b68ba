#ifndef NASHLAB_RNG_HPP
#define NASHLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace nashlab {

/// Independent random streams derived from one master seed.
enum class Stream : std::uint64_t {
  environment = 1,
  initial_state = 2,
  clock = 3,
  corpus = 4,
  field = 5,
  realization = 6,
  check_times = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based seed derivation: (master, stream, index) -> seed.
inline std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL));
  return splitmix64(h ^ (index * 0x8cb92ba72f3d8dd7ULL + 0x632be59bd9b4e019ULL));
}

/// mt19937_64 with distributions written out so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double exponential(double rate) { return -std::log(uniform_open0()) / rate; }
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }
  /// Standard normal via Box-Muller.
  double normal() {
    const double u = uniform_open0();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nashlab

#endif  // NASHLAB_RNG_HPP
