#include "tgat/cli/gradcheck_suite.hpp"

#include <algorithm>
#include <functional>

#include "tgat/error.hpp"
#include "tgat/graph/graph.hpp"
#include "tgat/model/model.hpp"
#include "tgat/numerics/grad_check.hpp"
#include "tgat/numerics/ops.hpp"
#include "tgat/train/loss.hpp"

namespace tgat::cli {

using namespace numerics;

const GradCheckEntry& GradCheckReport::worst() const {
  if (entries.empty()) throw ContractError("gradcheck report is empty");
  return *std::max_element(entries.begin(), entries.end(),
                           [](const auto& a, const auto& b) { return a.max_rel_error < b.max_rel_error; });
}

bool GradCheckReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [&](const auto& e) { return e.max_rel_error < tolerance; });
}

namespace {

Tensor rand(Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  CounterRng rng(seed);
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

// Keeps entries off the kinks of piecewise-linear activations.
Tensor rand_off_zero(Shape shape, std::uint64_t seed) {
  Tensor t = rand(std::move(shape), seed);
  for (std::size_t i = 0; i < t.numel(); ++i)
    if (std::abs(t[i]) < 0.05) t[i] += t[i] < 0 ? -0.05 : 0.05;
  return t;
}

// Random linear functional, so every output entry gets a distinct weight.
Var probe(Tape& t, Var y, std::uint64_t seed) { return sum(mul(y, t.constant(rand(y.shape(), seed)))); }

// Correct forward, backward scaled by 1.01.
Var faulty_double(Var x) {
  Tensor y = x.value();
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] *= 2.0;
  const std::size_t in = x.id;
  return x.tape->record("faulty_double", std::move(y), {x}, [in](Tape& t, const Tensor& g) {
    if (Tensor* gi = t.grad_sink(in))
      for (std::size_t i = 0; i < g.numel(); ++i) (*gi)[i] += 2.02 * g[i];
  });
}

struct OpCase {
  const char* name;
  ScalarFn fn;
  std::function<std::vector<Tensor>(std::uint64_t)> inputs;
};

std::vector<OpCase> op_cases(bool inject_fault) {
  using V = std::vector<Var>;
  using T = std::vector<Tensor>;
  std::vector<OpCase> c = {
      {"add", [](Tape& t, const V& v) { return probe(t, add(v[0], v[1]), 1); },
       [](std::uint64_t s) { return T{rand({3, 4}, s), rand({3, 4}, s + 1)}; }},
      {"mul", [](Tape& t, const V& v) { return probe(t, mul(v[0], v[1]), 2); },
       [](std::uint64_t s) { return T{rand({3, 4}, s), rand({3, 4}, s + 1)}; }},
      {"scale", [](Tape& t, const V& v) { return probe(t, scale(v[0], -1.7), 3); },
       [](std::uint64_t s) { return T{rand({5}, s)}; }},
      {"reshape", [](Tape& t, const V& v) { return probe(t, reshape(v[0], {4, 3}), 4); },
       [](std::uint64_t s) { return T{rand({2, 6}, s)}; }},
      {"matmul", [](Tape& t, const V& v) { return probe(t, matmul(v[0], v[1]), 5); },
       [](std::uint64_t s) { return T{rand({3, 4}, s), rand({4, 2}, s + 1)}; }},
      {"batched_matmul", [](Tape& t, const V& v) { return probe(t, batched_matmul(v[0], v[1]), 6); },
       [](std::uint64_t s) { return T{rand({2, 3, 4}, s), rand({2, 4, 2}, s + 1)}; }},
      {"add_bias", [](Tape& t, const V& v) { return probe(t, add_bias(v[0], v[1]), 7); },
       [](std::uint64_t s) { return T{rand({3, 4}, s), rand({4}, s + 1)}; }},
      {"scale_by", [](Tape& t, const V& v) { return probe(t, scale_by(v[0], v[1]), 8); },
       [](std::uint64_t s) { return T{rand({2, 3, 4}, s), rand({2, 3}, s + 1)}; }},
      {"log", [](Tape& t, const V& v) { return probe(t, log(v[0]), 9); },
       [](std::uint64_t s) { return T{rand({6}, s, 0.5, 3.0)}; }},
      {"permute3", [](Tape& t, const V& v) { return probe(t, permute3(v[0], {2, 0, 1}), 10); },
       [](std::uint64_t s) { return T{rand({2, 3, 4}, s)}; }},
      {"softmax", [](Tape& t, const V& v) { return probe(t, softmax(v[0], 1), 11); },
       [](std::uint64_t s) { return T{rand({3, 5, 2}, s, -3, 3)}; }},
      {"mean_pool", [](Tape& t, const V& v) { return probe(t, mean_pool(v[0], 1), 12); },
       [](std::uint64_t s) { return T{rand({3, 5, 2}, s)}; }},
      {"layer_norm", [](Tape& t, const V& v) { return probe(t, layer_norm(v[0], v[1], v[2]), 13); },
       [](std::uint64_t s) { return T{rand({4, 6}, s, -2, 2), rand({6}, s + 1), rand({6}, s + 2)}; }},
      {"batch_norm.train",
       [](Tape& t, const V& v) {
         BatchNormState st = BatchNormState::fresh(3);
         return probe(t, batch_norm(v[0], v[1], v[2], st, Mode::train), 14);
       },
       [](std::uint64_t s) { return T{rand({4, 3, 5}, s, -2, 2), rand({3}, s + 1), rand({3}, s + 2)}; }},
      {"batch_norm.eval",
       [](Tape& t, const V& v) {
         BatchNormState st = BatchNormState::fresh(3);
         st.running_mean = Tensor::from({0.1, -0.2, 0.3});
         st.running_var = Tensor::from({0.5, 1.5, 2.0});
         return probe(t, batch_norm(v[0], v[1], v[2], st, Mode::eval), 15);
       },
       [](std::uint64_t s) { return T{rand({4, 3}, s), rand({3}, s + 1), rand({3}, s + 2)}; }},
      {"prelu", [](Tape& t, const V& v) { return probe(t, prelu(v[0], v[1], 1), 16); },
       [](std::uint64_t s) { return T{rand_off_zero({2, 3, 4}, s), rand({3}, s + 1, 0.0, 0.5)}; }},
      {"elu", [](Tape& t, const V& v) { return probe(t, elu(v[0], 1.0), 17); },
       [](std::uint64_t s) { return T{rand_off_zero({10}, s)}; }},
      {"leaky_relu", [](Tape& t, const V& v) { return probe(t, leaky_relu(v[0], 0.2), 18); },
       [](std::uint64_t s) { return T{rand_off_zero({10}, s)}; }},
      {"conv_temporal", [](Tape& t, const V& v) { return probe(t, conv_temporal(v[0], v[1]), 19); },
       [](std::uint64_t s) { return T{rand({2, 3, 12}, s), rand({2, 3, 4}, s + 1)}; }},
      {"depthwise_conv_spatial",
       [](Tape& t, const V& v) { return probe(t, depthwise_conv_spatial(v[0], v[1], 4), 20); },
       [](std::uint64_t s) { return T{rand({8, 2, 3}, s), rand({2, 3}, s + 1)}; }},
      {"dropout.channel",
       [](Tape& t, const V& v) {
         return probe(t, dropout(v[0], 0.4, DropoutGranularity::channel, Mode::train, CounterRng(5)), 21);
       },
       [](std::uint64_t s) { return T{rand({3, 4, 5}, s)}; }},
      {"dropout.element",
       [](Tape& t, const V& v) {
         return probe(t, dropout(v[0], 0.3, DropoutGranularity::element, Mode::train, CounterRng(6)), 22);
       },
       [](std::uint64_t s) { return T{rand({4, 5}, s)}; }},
      {"gather_rows", [](Tape& t, const V& v) { return probe(t, gather_rows(v[0], {2, 0, 2, 1}), 23); },
       [](std::uint64_t s) { return T{rand({3, 4}, s)}; }},
      {"scatter_add_rows", [](Tape& t, const V& v) { return probe(t, scatter_add_rows(v[0], {1, 0, 1, 2}, 3), 24); },
       [](std::uint64_t s) { return T{rand({4, 3}, s)}; }},
      {"segment_softmax",
       [](Tape& t, const V& v) { return probe(t, segment_softmax(v[0], {0, 1, 0, 2, 1, 2}, 3), 25); },
       [](std::uint64_t s) { return T{rand({2, 6}, s, -3, 3)}; }},
      {"segment_mean", [](Tape& t, const V& v) { return probe(t, segment_mean(v[0], {0, 0, 1, 1, 1}, 2), 26); },
       [](std::uint64_t s) { return T{rand({5, 3}, s)}; }},
      {"label_smoothed_ce",
       [](Tape&, const V& v) { return train::label_smoothed_ce(v[0], {1, 0, 1, 1}, 0.1); },
       [](std::uint64_t s) { return T{rand({4, 2}, s, -2, 2)}; }},
  };
  if (inject_fault)
    c.push_back({"faulty_double (injected)", [](Tape& t, const V& v) { return probe(t, faulty_double(v[0]), 27); },
                 [](std::uint64_t s) { return T{rand({4}, s)}; }});
  return c;
}

std::vector<graph::EEGGraph> synthetic_graphs(std::size_t graphs, std::size_t channels) {
  CounterRng rng(0xB47C);
  std::vector<graph::EEGGraph> out;
  for (std::size_t g = 0; g < graphs; ++g) {
    dsp::Segment s;
    s.label = static_cast<int>(g % 2);
    s.trial_id = "t" + std::to_string(g);
    s.samples.assign(channels, std::vector<double>(model::kInputLength));
    for (auto& ch : s.samples)
      for (auto& v : ch) v = rng.normal();
    out.push_back(graph::build_graph(s));
  }
  return out;
}

}  // namespace

GradCheckReport run_gradcheck_suite(const GradCheckSuiteOptions& opts) {
  GradCheckReport report;
  for (const auto& c : op_cases(opts.inject_fault)) {
    GradCheckEntry e{c.name, 0.0, 0, 0.0, 0.0};
    for (std::size_t d = 0; d < std::max<std::size_t>(opts.draws, 1); ++d) {
      const auto r = grad_check(c.fn, c.inputs(1000 + 17 * d), 1e-5);
      e.max_rel_error = std::max(e.max_rel_error, r.max_rel_error);
      e.coordinates += r.coordinates;
      e.max_abs_error = std::max(e.max_abs_error, r.max_abs_error);
      e.difference_quantum = std::max(e.difference_quantum, r.difference_quantum);
    }
    report.entries.push_back(std::move(e));
  }

  // full model, training mode with fixed dropout streams
  model::ModelConfig cfg;
  model::ModelParams params = model::ModelParams::init(cfg, 11);
  const graph::GraphBatch batch = graph::batch_graphs(synthetic_graphs(2, 4));
  GradCheckOptions go;
  go.max_coords_per_input = opts.model_coords;
  for (std::size_t g = 0; g < params.tensors.size(); ++g) {
    ScalarFn loss = [&](Tape& t, const std::vector<Var>& in) {
      std::vector<Var> vars;
      for (std::size_t i = 0; i < params.tensors.size(); ++i)
        vars.push_back(i == g ? in[0] : t.constant(params.tensors[i].value));
      model::BoundParams p(params, vars);
      const auto out = model::model_forward(t, batch, p, params, cfg, Mode::train, CounterRng(21));
      return train::label_smoothed_ce(out.logits, batch.labels, 0.1);
    };
    const auto r = grad_check(loss, {params.tensors[g].value}, go);
    report.entries.push_back({"model:" + params.tensors[g].name, r.max_rel_error, r.coordinates, r.max_abs_error,
                              r.difference_quantum});
  }
  return report;
}

}  // namespace tgat::cli
