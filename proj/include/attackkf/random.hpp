#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace attackkf {

/// Seeded random stream with a fully specified draw discipline.
///
/// Every normal() consumes exactly two engine draws (Box-Muller, cosine
/// branch, no caching), every uniform/bernoulli exactly one. This keeps the
/// engine position a pure function of the draw sequence, so seeded runs are
/// reproducible bit for bit and substream layouts can be audited.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1); never returns 0, safe under log().
  double uniform_open01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Standard normal via Box-Muller. Two engine draws per call.
  double normal() {
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Derive the seed of an independent substream from a base seed and a tag.
/// Used to split one run seed into process / measurement / attack streams.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t tag) {
  return detail::splitmix64(base_seed ^ detail::splitmix64(tag));
}

inline RandomStream derive_stream(std::uint64_t base_seed, std::uint64_t tag) {
  return RandomStream(derive_seed(base_seed, tag));
}

}  // namespace attackkf
