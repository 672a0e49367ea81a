#pragma once

#include <vector>

#include "tgat/numerics/tape.hpp"
#include "tgat/numerics/tensor.hpp"

namespace tgat::train {

struct CeResult {
  double loss = 0.0;
  numerics::Tensor dlogits;  // d loss / d logits
};

/// Mean over the batch of -sum_k y'_k log softmax(logits)_k with
/// y' = (1 - eps) onehot + eps / K.
CeResult label_smoothed_ce(const numerics::Tensor& logits, const std::vector<int>& targets, double eps);

/// Same loss recorded on the tape.
numerics::Var label_smoothed_ce(numerics::Var logits, const std::vector<int>& targets, double eps);

}  // namespace tgat::train
