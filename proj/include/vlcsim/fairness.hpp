#pragma once

namespace vlcsim {

/// beta-proportional fairness utility psi(r) = r^(1-beta) / (1-beta) for
/// beta != 1. Negative-valued for beta > 1, so maximizing it is the same as
/// minimizing its absolute value.
double psi(double rate, double beta);

/// d psi / d r = r^(-beta).
double psi_prime(double rate, double beta);

}  // namespace vlcsim
