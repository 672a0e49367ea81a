#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "tgat/numerics/tensor.hpp"

namespace tgat::numerics {

class Tape;

/// Handle to a node recorded on a Tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t dim(std::size_t axis) const { return value().dim(axis); }
  std::size_t numel() const { return value().numel(); }
};

/// Reverse-mode tape for a single forward pass.
///
/// Records are appended in evaluation order, so ids are a topological order.
/// backward() sweeps the records once in reverse, accumulating each node's
/// gradient as the sum over its consumers, then releases every intermediate.
/// Leaf gradients stay readable afterwards; the tape cannot be swept twice.
class Tape {
 public:
  // Receives the gradient of the recorded output and accumulates into the
  // inputs through grad_sink().
  using BackwardFn = std::function<void(Tape&, const Tensor& grad_out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  Var constant(Tensor value);
  Var leaf(Tensor value, bool requires_grad = true);

  Var record(std::string_view op, Tensor value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var record(std::string_view op, Tensor value, const std::vector<Var>& inputs, BackwardFn fn);

  const Tensor& value(Var v) const;
  const Tensor& value(std::size_t id) const;
  bool requires_grad(Var v) const;
  bool requires_grad(std::size_t id) const;

  /// Gradient accumulator for an input, zero-initialised on first use;
  /// nullptr when the node does not need a gradient.
  Tensor* grad_sink(std::size_t id);
  Tensor* grad_sink(Var v) { return grad_sink(v.id); }

  void backward(Var loss);

  /// Gradient of a leaf after backward(); zeros when the loss did not reach it.
  Tensor grad(Var v) const;

  std::size_t size() const noexcept { return records_.size(); }
  bool consumed() const noexcept { return consumed_; }

 private:
  struct Record {
    std::string op;
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool is_leaf = false;
    std::vector<std::size_t> inputs;
    BackwardFn fn;
  };

  Var push(Record rec);
  void check_owned(Var v) const;

  std::vector<Record> records_;
  bool consumed_ = false;
};

namespace debug {

/// Test hook: while set, the backward rule of the named op receives a
/// corrupted upstream gradient. Used to prove the gradient checker is
/// sensitive. Not thread-safe; set before any tape is built.
void set_backward_fault(std::string op_name);
void clear_backward_fault();
const std::string& backward_fault();

}  // namespace debug

}  // namespace tgat::numerics
