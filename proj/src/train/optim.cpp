#include "tgat/train/optim.hpp"

#include <cmath>

#include "tgat/error.hpp"

namespace tgat::train {

void adamw_step(std::vector<model::NamedTensor>& params, const std::vector<Tensor>& grads, AdamWState& state,
                const AdamWConfig& cfg) {
  if (grads.size() != params.size())
    throw ShapeError("adamw_step: " + std::to_string(grads.size()) + " gradients for " +
                     std::to_string(params.size()) + " parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!grads[i].same_shape(params[i].value))
      throw ShapeError("adamw_step: gradient of '" + params[i].name + "' has shape " +
                       numerics::shape_str(grads[i].shape()) + ", parameter is " +
                       numerics::shape_str(params[i].value.shape()));
    if (!grads[i].all_finite()) throw NumericError("adamw_step: non-finite gradient for '" + params[i].name + "'");
  }
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.value.shape(), 0.0);
      state.v.emplace_back(p.value.shape(), 0.0);
    }
  }
  if (state.m.size() != params.size()) throw ContractError("adamw_step: optimizer state belongs to another model");

  ++state.t;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double* w = params[i].value.ptr();
    double* m = state.m[i].ptr();
    double* v = state.v[i].ptr();
    const double* g = grads[i].ptr();
    for (std::size_t k = 0; k < params[i].value.numel(); ++k) {
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      w[k] -= cfg.lr * (mhat / (std::sqrt(vhat) + cfg.eps) + cfg.weight_decay * w[k]);
    }
  }
}

}  // namespace tgat::train
