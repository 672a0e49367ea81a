#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tgat/model/config.hpp"
#include "tgat/numerics/ops.hpp"
#include "tgat/numerics/tape.hpp"
#include "tgat/numerics/tensor.hpp"

namespace tgat::model {

using numerics::BatchNormState;
using numerics::Tensor;
using numerics::Var;

struct NamedTensor {
  std::string name;
  Tensor value;
};

/// Trainable tensors in a fixed order plus the encoder's batch-norm running
/// statistics. Names:
///   enc.conv{1,2,3}.w, enc.bn{1,2,3}.gamma/.beta, enc.prelu{1,2,3}, enc.spatial.w,
///   tattn.q (only with temporal attention enabled),
///   gat{1,2}.wl/.wr/.att/.ln.gamma/.ln.beta/.prelu,
///   cls.w1, cls.b1, cls.w2, cls.b2
struct ModelParams {
  std::vector<NamedTensor> tensors;
  std::array<BatchNormState, 3> bn;

  /// Kaiming-uniform fan-in init for linear/conv maps, zero biases, unit
  /// norm gains, PReLU slopes 0.25, q ~ U(-0.1, 0.1).
  static ModelParams init(const ModelConfig& cfg, std::uint64_t seed);

  bool has(const std::string& name) const;
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  std::size_t scalar_count() const;
};

/// Parameter tensors recorded as tape leaves for one forward pass.
class BoundParams {
 public:
  BoundParams(numerics::Tape& tape, const ModelParams& params, bool requires_grad);
  /// Binds caller-provided vars, in the order of params.tensors.
  BoundParams(const ModelParams& params, const std::vector<Var>& vars);

  Var operator()(const std::string& name) const;
  bool has(const std::string& name) const { return index_.count(name) != 0; }
  const std::vector<Var>& vars() const noexcept { return vars_; }

 private:
  std::vector<Var> vars_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace tgat::model
