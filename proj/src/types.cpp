#include "vlcsim/types.hpp"

#include <cmath>
#include <stdexcept>

namespace vlcsim {

void RateTensor::validate() const {
  if (slices.empty()) throw std::invalid_argument("rate tensor: empty horizon");
  const auto rows = slices.front().rows();
  const auto cols = slices.front().cols();
  if (rows < 1 || cols < 1) throw std::invalid_argument("rate tensor: empty slice");
  for (const auto& s : slices) {
    if (s.rows() != rows || s.cols() != cols)
      throw std::invalid_argument("rate tensor: ragged slices");
    if (!((s >= 0.0).all()) || !s.isFinite().all())
      throw std::invalid_argument("rate tensor: entries must be finite and >= 0");
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over seed + stream * odd constant
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_in(Rng& rng, double lo, double hi) {
  if (!(hi > lo)) {
    rng();  // keep the draw count independent of the range
    return lo;
  }
  return lo + uniform01(rng) * (hi - lo);
}

}  // namespace vlcsim
