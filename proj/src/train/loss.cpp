#include "tgat/train/loss.hpp"

#include <algorithm>
#include <cmath>

#include "tgat/error.hpp"

namespace tgat::train {

using numerics::Tensor;

CeResult label_smoothed_ce(const Tensor& logits, const std::vector<int>& targets, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ParameterError("label_smoothed_ce: epsilon must lie in [0, 1)");
  if (logits.rank() != 2 || logits.dim(0) != targets.size())
    throw ShapeError("label_smoothed_ce: logits " + numerics::shape_str(logits.shape()) + " for " +
                     std::to_string(targets.size()) + " targets");
  const std::size_t b = logits.dim(0), k = logits.dim(1);
  CeResult r;
  r.dlogits = Tensor(logits.shape(), 0.0);
  const double off = eps / static_cast<double>(k);
  for (std::size_t i = 0; i < b; ++i) {
    if (targets[i] < 0 || static_cast<std::size_t>(targets[i]) >= k)
      throw IndexError("label_smoothed_ce: target " + std::to_string(targets[i]) + " outside [0, " +
                       std::to_string(k) + ")");
    const double* row = logits.ptr() + i * k;
    const double mx = *std::max_element(row, row + k);
    double den = 0.0;
    for (std::size_t c = 0; c < k; ++c) den += std::exp(row[c] - mx);
    const double lse = mx + std::log(den);
    for (std::size_t c = 0; c < k; ++c) {
      const double y = off + (static_cast<std::size_t>(targets[i]) == c ? 1.0 - eps : 0.0);
      r.loss -= y * (row[c] - lse);
      r.dlogits.at(i, c) = (std::exp(row[c] - lse) - y) / static_cast<double>(b);
    }
  }
  r.loss /= static_cast<double>(b);
  if (!std::isfinite(r.loss)) throw NumericError("label_smoothed_ce: non-finite loss");
  return r;
}

numerics::Var label_smoothed_ce(numerics::Var logits, const std::vector<int>& targets, double eps) {
  CeResult r = label_smoothed_ce(logits.value(), targets, eps);
  const std::size_t in = logits.id;
  return logits.tape->record("label_smoothed_ce", Tensor::scalar(r.loss), {logits},
                             [in, d = std::move(r.dlogits)](numerics::Tape& t, const Tensor& g) {
                               if (Tensor* gi = t.grad_sink(in)) {
                                 const double s = g[0];
                                 for (std::size_t i = 0; i < d.numel(); ++i) (*gi)[i] += s * d[i];
                               }
                             });
}

}  // namespace tgat::train
