#include "tgat/numerics/tape.hpp"

#include <utility>

#include "tgat/error.hpp"

namespace tgat::numerics {

namespace debug {
namespace {
std::string& fault_slot() {
  static std::string op;
  return op;
}
}  // namespace

void set_backward_fault(std::string op_name) { fault_slot() = std::move(op_name); }
void clear_backward_fault() { fault_slot().clear(); }
const std::string& backward_fault() { return fault_slot(); }
}  // namespace debug

const Tensor& Var::value() const {
  if (tape == nullptr) throw ContractError("Var is not bound to a tape");
  return tape->value(id);
}

Var Tape::push(Record rec) {
  if (consumed_) throw ContractError("tape already swept by backward(); build a new tape per pass");
  records_.push_back(std::move(rec));
  return Var{this, records_.size() - 1};
}

void Tape::check_owned(Var v) const {
  if (v.tape != this || v.id >= records_.size()) throw ContractError("Var belongs to a different tape");
}

Var Tape::constant(Tensor value) {
  Record r;
  r.op = "constant";
  r.value = std::move(value);
  r.is_leaf = true;
  return push(std::move(r));
}

Var Tape::leaf(Tensor value, bool requires_grad) {
  Record r;
  r.op = "leaf";
  r.value = std::move(value);
  r.requires_grad = requires_grad;
  r.is_leaf = true;
  return push(std::move(r));
}

Var Tape::record(std::string_view op, Tensor value, std::initializer_list<Var> inputs, BackwardFn fn) {
  return record(op, std::move(value), std::vector<Var>(inputs), std::move(fn));
}

Var Tape::record(std::string_view op, Tensor value, const std::vector<Var>& inputs, BackwardFn fn) {
  Record r;
  r.op = std::string(op);
  r.value = std::move(value);
  for (const Var& in : inputs) {
    check_owned(in);
    r.inputs.push_back(in.id);
    r.requires_grad = r.requires_grad || records_[in.id].requires_grad;
  }
  if (r.requires_grad) {
    const std::string& fault = debug::backward_fault();
    if (!fault.empty() && fault == r.op) {
      r.fn = [inner = std::move(fn)](Tape& t, const Tensor& g) {
        Tensor bad = g;
        for (std::size_t i = 0; i < bad.numel(); ++i) bad[i] = bad[i] * 1.5 + 1e-3;
        inner(t, bad);
      };
    } else {
      r.fn = std::move(fn);
    }
  }
  return push(std::move(r));
}

const Tensor& Tape::value(Var v) const {
  check_owned(v);
  return records_[v.id].value;
}

const Tensor& Tape::value(std::size_t id) const { return records_.at(id).value; }

bool Tape::requires_grad(Var v) const {
  check_owned(v);
  return records_[v.id].requires_grad;
}

bool Tape::requires_grad(std::size_t id) const { return records_.at(id).requires_grad; }

Tensor* Tape::grad_sink(std::size_t id) {
  Record& r = records_.at(id);
  if (!r.requires_grad) return nullptr;
  if (r.grad.empty()) r.grad = Tensor(r.value.shape(), 0.0);
  return &r.grad;
}

void Tape::backward(Var loss) {
  check_owned(loss);
  if (consumed_) throw ContractError("backward() called twice on the same tape");
  const Tensor& lv = records_[loss.id].value;
  if (lv.numel() != 1)
    throw ContractError("backward() needs a scalar loss, got shape " + shape_str(lv.shape()));
  consumed_ = true;
  if (!records_[loss.id].requires_grad) return;
  records_[loss.id].grad = Tensor(lv.shape(), 1.0);

  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Record& r = records_[i];
    if (r.is_leaf) continue;
    if (r.fn && !r.grad.empty()) {
      // fn may touch grads of lower ids only, so `r` stays valid.
      r.fn(*this, r.grad);
    }
    r.fn = nullptr;
    r.grad = Tensor();
    r.value = Tensor();
  }
}

Tensor Tape::grad(Var v) const {
  check_owned(v);
  const Record& r = records_[v.id];
  if (!r.grad.empty()) return r.grad;
  return Tensor(r.value.shape(), 0.0);
}

}  // namespace tgat::numerics
