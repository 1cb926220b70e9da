#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "qrivx/types.hpp"

namespace qrivx {

namespace detail {
// splitmix64; used only to spread seed material, never as the main generator
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Seedable generator with derivable sub-streams. stream(i) yields a
// generator statistically independent of this one and of stream(j), j != i,
// so Monte Carlo replications can draw in parallel yet reproducibly.
//
// Normal variates use Box-Muller on explicit 53-bit uniforms instead of
// std::normal_distribution, whose output is implementation defined; results
// are therefore identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(expand(seed)) {}

  Rng stream(std::uint64_t index) const {
    std::uint64_t s = seed_;
    std::uint64_t a = detail::splitmix64(s);
    s = seed_ ^ (0x9E3779B97F4A7C15ULL * (index + 1));
    std::uint64_t b = detail::splitmix64(s);
    return Rng(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
  }

  std::uint64_t seed() const { return seed_; }

  // uniform on (0,1); never returns 0 or 1
  double uniform() {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Vector normal_vector(Index n) {
    Vector out(n);
    for (Index i = 0; i < n; ++i) out[i] = normal();
    return out;
  }

  Matrix normal_matrix(Index rows, Index cols) {
    Matrix out(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) out(r, c) = normal();
    return out;
  }

 private:
  static std::uint64_t expand(std::uint64_t seed) {
    std::uint64_t s = seed;
    return detail::splitmix64(s);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qrivx
