#pragma once

// Counter-based splittable RNG. Every draw is a pure hash of
// (seed-derived key, stream, counter), so independently seeded substreams can
// be evaluated on any thread layout and still produce identical output for a
// given master seed.

#include "fdpp/common.hpp"

#include <cstdint>
#include <limits>

namespace fdpp {

struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

namespace detail {

// SplitMix64 finalizer; bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (mix64(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

}  // namespace detail

// Derive the substream used for an indexed unit of work (e.g. one shot).
inline RngSpec substream(const RngSpec& spec, std::uint64_t index) {
  return RngSpec{spec.seed, detail::combine(spec.stream, index)};
}

// Two-level derivation: phase (algorithm stage) then index within the phase.
inline RngSpec substream(const RngSpec& spec, std::uint64_t phase,
                         std::uint64_t index) {
  return substream(substream(spec, phase), index);
}

class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(const RngSpec& spec)
      : key_(detail::combine(detail::mix64(spec.seed), spec.stream)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return detail::combine(key_, counter_++); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Uniform double in [0, 1) with 53-bit resolution.
inline double uniform01(CounterRng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(CounterRng& rng, double p) { return uniform01(rng) < p; }

// Standard normal via Box-Muller (two uniforms per pair of calls is avoided:
// each call draws fresh uniforms; determinism only needs a fixed draw order).
inline double normal01(CounterRng& rng) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  // Guard the log endpoint.
  if (u1 <= 0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

// Index into a cumulative distribution (inclusive prefix sums); the final
// entry is treated as the total mass.
inline std::size_t discrete_from_cdf(const std::vector<double>& cdf,
                                     double u) {
  const double total = cdf.back();
  double x = u * total;
  std::size_t lo = 0, hi = cdf.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (cdf[mid] <= x)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

template <typename Real>
Index discrete_from_cdf(const VectorR<Real>& cdf, double u) {
  const Real total = cdf(cdf.size() - 1);
  const Real x = static_cast<Real>(u) * total;
  Index lo = 0, hi = cdf.size() - 1;
  while (lo < hi) {
    const Index mid = (lo + hi) / 2;
    if (cdf(mid) <= x)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace fdpp
