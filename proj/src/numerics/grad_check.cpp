#include "tgat/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "tgat/error.hpp"

namespace tgat::numerics {

namespace {

double evaluate(const ScalarFn& f, const std::vector<Tensor>& inputs) {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(inputs.size());
  for (const auto& in : inputs) vars.push_back(tape.leaf(in, false));
  return f(tape, vars).value().item();
}

std::vector<std::size_t> probe_indices(std::size_t n, std::size_t max_coords) {
  std::vector<std::size_t> idx;
  if (max_coords == 0 || max_coords >= n) {
    idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
  }
  for (std::size_t j = 0; j < max_coords; ++j) idx.push_back(j * (n - 1) / (max_coords - 1));
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

}  // namespace

GradCheckResult grad_check(const ScalarFn& f, const std::vector<Tensor>& inputs, GradCheckOptions opts) {
  if (opts.step <= 0.0) throw ParameterError("grad_check: step must be positive");

  std::vector<Tensor> analytic;
  {
    Tape tape;
    std::vector<Var> vars;
    for (const auto& in : inputs) vars.push_back(tape.leaf(in, true));
    Var loss = f(tape, vars);
    tape.backward(loss);
    for (const auto& v : vars) analytic.push_back(tape.grad(v));
  }

  GradCheckResult res;
  std::vector<Tensor> probe = inputs;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t i : probe_indices(inputs[k].numel(), opts.max_coords_per_input)) {
      const double orig = probe[k][i];
      probe[k][i] = orig + opts.step;
      const double fp = evaluate(f, probe);
      probe[k][i] = orig - opts.step;
      const double fm = evaluate(f, probe);
      probe[k][i] = orig;
      const double numeric = (fp - fm) / (2.0 * opts.step);
      const double a = analytic[k][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      ++res.coordinates;
      res.max_abs_error = std::max(res.max_abs_error, std::abs(a - numeric));
      const double big = std::max(std::abs(fp), std::abs(fm));
      res.difference_quantum =
          std::max(res.difference_quantum, (std::nextafter(big, INFINITY) - big) / (2.0 * opts.step));
      if (rel > res.max_rel_error || std::isnan(rel)) {
        res.max_rel_error = std::isnan(rel) ? INFINITY : rel;
        res.worst_input = k;
        res.worst_index = i;
        res.analytic = a;
        res.numeric = numeric;
      }
    }
  }
  return res;
}

}  // namespace tgat::numerics
