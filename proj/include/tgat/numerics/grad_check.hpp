#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "tgat/numerics/tape.hpp"
#include "tgat/numerics/tensor.hpp"

namespace tgat::numerics {

/// Builds a scalar from leaves bound on a fresh tape. Must be deterministic
/// (stochastic ops draw from fixed streams) so repeated calls agree.
using ScalarFn = std::function<Var(Tape&, const std::vector<Var>&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_input = 0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
  double max_abs_error = 0.0;
  /// One ulp of the larger loss value divided by 2h, maximized over the
  /// probed coordinates: the smallest nonzero central difference.
  double difference_quantum = 0.0;
};

struct GradCheckOptions {
  double step = 1e-5;
  /// Coordinates probed per input; 0 probes all, otherwise an evenly strided
  /// subset including the first and last entry.
  std::size_t max_coords_per_input = 0;
};

/// Central differences (f(x+h) - f(x-h)) / 2h against reverse-mode gradients;
/// relative error uses max(|analytic|, |numeric|, 1e-8) as denominator.
GradCheckResult grad_check(const ScalarFn& f, const std::vector<Tensor>& inputs, GradCheckOptions opts = {});

inline GradCheckResult grad_check(const ScalarFn& f, const std::vector<Tensor>& inputs, double step) {
  return grad_check(f, inputs, GradCheckOptions{step, 0});
}

}  // namespace tgat::numerics
