#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "tgat/numerics/tensor.hpp"

namespace tgat::testing {

inline numerics::Tensor random_tensor(numerics::Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  numerics::Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = dist(gen);
  return t;
}

// Keeps entries away from 0 so piecewise-linear kinks do not sit inside the
// finite-difference stencil.
inline numerics::Tensor random_away_from_zero(numerics::Shape shape, std::uint64_t seed, double margin = 0.05) {
  numerics::Tensor t = random_tensor(std::move(shape), seed);
  for (std::size_t i = 0; i < t.numel(); ++i)
    if (std::abs(t[i]) < margin) t[i] = t[i] < 0 ? t[i] - margin : t[i] + margin;
  return t;
}

inline double max_abs_diff(const numerics::Tensor& a, const numerics::Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace tgat::testing
