#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nbp/forward.hpp"

namespace nbp {

namespace {

// SplitMix64 finalizer applied to a counter; stateless, so any entry can be
// drawn independently.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_word(std::uint64_t seed, std::uint64_t counter) {
  return splitmix64(splitmix64(seed) ^ (counter * 0xD1B54A32D192ED03ULL));
}

// (0, 1], 53-bit resolution.
double open_unit(std::uint64_t w) { return (static_cast<double>(w >> 11) + 1.0) * 0x1.0p-53; }

}  // namespace

double counter_normal(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t pair = index >> 1;
  const double u1 = open_unit(stream_word(seed, 2 * pair));
  const double u2 = open_unit(stream_word(seed, 2 * pair + 1));
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (index & 1) ? radius * std::sin(angle) : radius * std::cos(angle);
}

TraceMatrix add_gaussian_noise(const TraceMatrix& trace, double percent, std::uint64_t seed) {
  if (!(percent >= 0.0)) throw std::invalid_argument("noise percent must be non-negative");
  TraceMatrix out = trace;
  out.set_noise(percent, seed);
  if (percent == 0.0) return out;
  const double sigma = percent / 100.0 * trace.max_abs();
  auto v = out.values();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += sigma * counter_normal(seed, i);
  return out;
}

}  // namespace nbp
