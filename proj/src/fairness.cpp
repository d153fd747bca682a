#include "vlcsim/fairness.hpp"

#include <cmath>
#include <stdexcept>

namespace vlcsim {

double psi(double rate, double beta) {
  if (!(rate > 0.0)) throw std::invalid_argument("psi: rate must be > 0");
  if (!(beta > 0.0) || beta == 1.0)
    throw std::invalid_argument("psi: beta must be positive and != 1");
  return std::pow(rate, 1.0 - beta) / (1.0 - beta);
}

double psi_prime(double rate, double beta) {
  if (!(rate > 0.0)) throw std::invalid_argument("psi_prime: rate must be > 0");
  return std::pow(rate, -beta);
}

}  // namespace vlcsim
