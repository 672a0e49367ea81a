#pragma once

#include <cstdint>
#include <vector>

#include "tgat/model/params.hpp"
#include "tgat/numerics/tensor.hpp"

namespace tgat::train {

using numerics::Tensor;

struct AdamWConfig {
  double lr = 3e-4;
  double weight_decay = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamWState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::uint64_t t = 0;
};

/// One decoupled-weight-decay Adam step:
///   w <- w - lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * w).
/// State is lazily sized on the first call. A non-finite gradient raises
/// NumericError naming the parameter, before anything is modified.
void adamw_step(std::vector<model::NamedTensor>& params, const std::vector<Tensor>& grads, AdamWState& state,
                const AdamWConfig& cfg);

}  // namespace tgat::train
