#include "tgat/model/params.hpp"

#include <cmath>

#include "tgat/error.hpp"
#include "tgat/numerics/rng.hpp"

namespace tgat::model {

namespace {

using numerics::CounterRng;
using numerics::Shape;

Tensor kaiming(Shape shape, std::size_t fan_in, CounterRng rng) {
  Tensor t(std::move(shape));
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(-bound, bound);
  return t;
}

}  // namespace

ModelParams ModelParams::init(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const CounterRng root = CounterRng(seed).split(0x1417);
  ModelParams p;
  auto add = [&](std::string name, Tensor value) { p.tensors.push_back({std::move(name), std::move(value)}); };
  auto stream = [&] { return root.split(p.tensors.size()); };

  const std::size_t fin[3] = {1, cfg.f1, cfg.f2};
  const std::size_t fout[3] = {cfg.f1, cfg.f2, cfg.f3};
  for (std::size_t s = 0; s < 3; ++s) {
    const std::string n = std::to_string(s + 1);
    add("enc.conv" + n + ".w", kaiming({fout[s], fin[s], kKernelLengths[s]}, fin[s] * kKernelLengths[s], stream()));
    add("enc.bn" + n + ".gamma", Tensor({fout[s]}, 1.0));
    add("enc.bn" + n + ".beta", Tensor({fout[s]}, 0.0));
    add("enc.prelu" + n, Tensor({fout[s]}, 0.25));
    p.bn[s] = BatchNormState::fresh(fout[s]);
  }
  add("enc.spatial.w", kaiming({cfg.f3, cfg.spatial_kernel}, cfg.spatial_kernel, stream()));

  if (cfg.enable_temporal_attention) {
    CounterRng r = stream();
    Tensor q({cfg.f3});
    for (std::size_t i = 0; i < cfg.f3; ++i) q[i] = r.uniform(-0.1, 0.1);
    add("tattn.q", std::move(q));
  }

  const std::size_t h1 = cfg.gat1_heads * cfg.gat1_head_dim;
  add("gat1.wl", kaiming({cfg.f3, h1}, cfg.f3, stream()));
  add("gat1.wr", kaiming({cfg.f3, h1}, cfg.f3, stream()));
  add("gat1.att", kaiming({cfg.gat1_heads, cfg.gat1_head_dim}, cfg.gat1_head_dim, stream()));
  add("gat1.ln.gamma", Tensor({cfg.gat1_out()}, 1.0));
  add("gat1.ln.beta", Tensor({cfg.gat1_out()}, 0.0));
  add("gat1.prelu", Tensor({1}, 0.25));

  add("gat2.wl", kaiming({cfg.gat1_out(), cfg.gat2_dim}, cfg.gat1_out(), stream()));
  add("gat2.wr", kaiming({cfg.gat1_out(), cfg.gat2_dim}, cfg.gat1_out(), stream()));
  add("gat2.att", kaiming({1, cfg.gat2_dim}, cfg.gat2_dim, stream()));
  add("gat2.ln.gamma", Tensor({cfg.gat2_dim}, 1.0));
  add("gat2.ln.beta", Tensor({cfg.gat2_dim}, 0.0));
  add("gat2.prelu", Tensor({1}, 0.25));

  add("cls.w1", kaiming({cfg.gat2_dim, cfg.classifier_hidden}, cfg.gat2_dim, stream()));
  add("cls.b1", Tensor({cfg.classifier_hidden}, 0.0));
  add("cls.w2", kaiming({cfg.classifier_hidden, cfg.classes}, cfg.classifier_hidden, stream()));
  add("cls.b2", Tensor({cfg.classes}, 0.0));
  return p;
}

bool ModelParams::has(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return true;
  return false;
}

Tensor& ModelParams::at(const std::string& name) {
  for (auto& t : tensors)
    if (t.name == name) return t.value;
  throw IndexError("no parameter named '" + name + "'");
}

const Tensor& ModelParams::at(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t.value;
  throw IndexError("no parameter named '" + name + "'");
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.value.numel();
  return n;
}

BoundParams::BoundParams(numerics::Tape& tape, const ModelParams& params, bool requires_grad) {
  vars_.reserve(params.tensors.size());
  for (const auto& t : params.tensors) {
    index_.emplace(t.name, vars_.size());
    vars_.push_back(tape.leaf(t.value, requires_grad));
  }
}

BoundParams::BoundParams(const ModelParams& params, const std::vector<Var>& vars) : vars_(vars) {
  if (vars.size() != params.tensors.size())
    throw ContractError("BoundParams: " + std::to_string(vars.size()) + " vars for " +
                        std::to_string(params.tensors.size()) + " parameters");
  for (std::size_t i = 0; i < params.tensors.size(); ++i) index_.emplace(params.tensors[i].name, i);
}

Var BoundParams::operator()(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw IndexError("parameter '" + name + "' is not bound");
  return vars_[it->second];
}

}  // namespace tgat::model
