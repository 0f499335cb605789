#pragma once

#include <algorithm>
#include <cmath>

// Unchecked scalar cores shared by the public scoring functions and the batch
// kernels so both paths round identically.
namespace hmem::detail {

// w never reaches 0: older facts are down-weighted, never cut off.
inline constexpr double kMinWeight = 1e-300;

inline double harmonic(double a, double b) noexcept {
  const double sum = a + b;
  if (!(sum > 0.0)) return 0.0;
  const double hm = 2.0 * a * b / sum;
  return std::clamp(hm, std::min(a, b), std::max(a, b));
}

inline double weibull(double delta_tau, double tau_hat, double shape) noexcept {
  if (delta_tau <= 0.0) return 1.0;
  const double w = std::exp(-std::pow(delta_tau / tau_hat, shape));
  return w < kMinWeight ? kMinWeight : w;
}

}  // namespace hmem::detail
