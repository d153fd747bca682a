#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace vlcsim {

using Vec2 = Eigen::Vector2d;
using Eigen::ArrayXd;
using Eigen::ArrayXXd;

using Rng = std::mt19937_64;

// One position per user; a prediction horizon is a vector of frames where
// frames[t-1] holds the positions t service times ahead.
using PositionFrame = std::vector<Vec2>;

/// Predicted achievable rates R[t](user, ap) in bit/s for t = 1..T.
struct RateTensor {
  std::vector<ArrayXXd> slices;  // slices[t-1], each users x aps

  int horizon() const { return static_cast<int>(slices.size()); }
  int users() const { return slices.empty() ? 0 : static_cast<int>(slices.front().rows()); }
  int aps() const { return slices.empty() ? 0 : static_cast<int>(slices.front().cols()); }

  // 1-based service-time index, matching the t superscript convention.
  const ArrayXXd& at(int t) const { return slices.at(static_cast<std::size_t>(t - 1)); }
  ArrayXXd& at(int t) { return slices.at(static_cast<std::size_t>(t - 1)); }

  void validate() const;
};

// splitmix64 mix; derives independent per-stream seeds from one master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Uniform draw in [0, 1) from the top 53 bits of the engine output.
double uniform01(Rng& rng);
// Uniform in [lo, hi); degenerate ranges return lo.
double uniform_in(Rng& rng, double lo, double hi);

}  // namespace vlcsim
