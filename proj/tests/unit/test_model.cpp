#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "tgat/error.hpp"
#include "tgat/model/checkpoint.hpp"
#include "tgat/model/model.hpp"
#include "tgat/numerics/grad_check.hpp"

using namespace tgat;
using namespace tgat::model;
using namespace tgat::numerics;
using tgat::testing::max_abs_diff;
using tgat::testing::random_tensor;

namespace {

std::vector<graph::EEGGraph> random_graphs(std::size_t b, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d;
  std::vector<graph::EEGGraph> gs;
  for (std::size_t g = 0; g < b; ++g) {
    dsp::Segment s;
    s.label = static_cast<int>(g % 2);
    s.trial_id = "t" + std::to_string(g);
    s.samples.assign(c, std::vector<double>(kInputLength));
    for (auto& ch : s.samples)
      for (auto& v : ch) v = d(gen);
    gs.push_back(graph::build_graph(s));
  }
  return gs;
}

ModelConfig small_config() {
  ModelConfig c;
  c.f1 = c.f2 = c.f3 = 4;
  c.gat1_heads = 2;
  c.gat1_head_dim = 3;
  c.gat2_dim = 5;
  c.classifier_hidden = 6;
  return c;
}

// Non-trivial running statistics so eval mode is not an identity.
void randomize_bn(ModelParams& p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5), m(-0.2, 0.2);
  for (auto& bn : p.bn)
    for (std::size_t i = 0; i < bn.running_mean.numel(); ++i) {
      bn.running_mean[i] = m(gen);
      bn.running_var[i] = u(gen);
    }
}

double lrelu(double x) { return x > 0 ? x : 0.2 * x; }

// Direct per-edge GATv2 computation on plain arrays.
struct GatOracle {
  std::vector<std::vector<double>> out;
  std::vector<std::vector<double>> alpha;  // [H][E]
};

GatOracle gat_oracle(const Tensor& h, const std::vector<graph::Edge>& edges, const Tensor& wl, const Tensor& wr,
                     const Tensor& att, const Tensor& g, const Tensor& b, double slope, bool concat) {
  const std::size_t n = h.dim(0), fin = h.dim(1), width = wl.dim(1), heads = att.dim(0), fh = att.dim(1);
  auto lin = [&](const Tensor& w, std::size_t node, std::size_t col) {
    double s = 0;
    for (std::size_t k = 0; k < fin; ++k) s += h.at(node, k) * w.at(k, col);
    return s;
  };
  GatOracle o;
  o.alpha.assign(heads, std::vector<double>(edges.size()));
  std::vector<std::vector<double>> agg(n, std::vector<double>(width, 0.0));
  for (std::size_t hd = 0; hd < heads; ++hd)
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::size_t> in;
      for (std::size_t e = 0; e < edges.size(); ++e)
        if (edges[e].dst == i) in.push_back(e);
      std::vector<double> score;
      for (std::size_t e : in) {
        double s = 0;
        for (std::size_t k = 0; k < fh; ++k)
          s += att.at(hd, k) * lrelu(lin(wl, i, hd * fh + k) + lin(wr, edges[e].src, hd * fh + k));
        score.push_back(s);
      }
      const double mx = *std::max_element(score.begin(), score.end());
      double den = 0;
      for (double s : score) den += std::exp(s - mx);
      for (std::size_t q = 0; q < in.size(); ++q) {
        const double a = std::exp(score[q] - mx) / den;
        o.alpha[hd][in[q]] = a;
        for (std::size_t k = 0; k < fh; ++k) agg[i][hd * fh + k] += a * lin(wr, edges[in[q]].src, hd * fh + k);
      }
    }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v = agg[i];
    if (!concat && heads > 1) {
      std::vector<double> avg(fh, 0.0);
      for (std::size_t hd = 0; hd < heads; ++hd)
        for (std::size_t k = 0; k < fh; ++k) avg[k] += v[hd * fh + k] / static_cast<double>(heads);
      v = avg;
    }
    double m = 0, var = 0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double x : v) var += (x - m) * (x - m);
    var /= static_cast<double>(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double y = g[k] * (v[k] - m) / std::sqrt(var + 1e-5) + b[k];
      v[k] = y > 0 ? y : slope * y;
    }
    o.out.push_back(v);
  }
  return o;
}

std::vector<graph::Edge> full_edges(std::size_t n) {
  std::vector<graph::Edge> e;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) e.push_back({j, i});
  return e;
}

// Mean cross entropy composed from primitives.
Var cross_entropy(Tape& t, Var logits, const std::vector<int>& labels) {
  Tensor onehot(logits.shape(), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) onehot.at(i, static_cast<std::size_t>(labels[i])) = 1.0;
  return scale(sum(mul(log(softmax(logits, 1)), t.constant(onehot))), -1.0 / static_cast<double>(labels.size()));
}

}  // namespace

TEST_CASE("config validation and json") {
  ModelConfig c;
  CHECK_NOTHROW(c.validate());
  ModelConfig bad = c;
  bad.temporal_dropout_p = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.temporal_segments = 7;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  const ModelConfig back = model_config_from_json(to_json(small_config()));
  CHECK(to_json(back) == to_json(small_config()));
  CHECK_THROWS_AS(model_config_from_json({{"f9", 3}}), ConfigError);
  CHECK_THROWS_AS(model_config_from_json({{"f1", "x"}}), ConfigError);
}

TEST_CASE("temporal encoder") {
  ModelConfig cfg;
  cfg.f1 = cfg.f2 = cfg.f3 = 16;
  ModelParams params = ModelParams::init(cfg, 1);
  const std::size_t b = 2, c = 8;
  auto gs = random_graphs(b, c, 3);
  const graph::GraphBatch batch = graph::batch_graphs(gs);

  Tape t;
  BoundParams p(t, params, false);
  OpRngStream ops(CounterRng(9));
  Var x = t.constant(Tensor({b * c, 1, kInputLength}, batch.node_features));
  Var z = temporal_encoder(x, p, params, cfg, c, Mode::train, ops);
  CHECK(z.shape() == Shape{16, 8, 16});

  Tape t2;
  BoundParams p2(t2, params, false);
  OpRngStream ops2(CounterRng(9));
  Var zeros = t2.constant(Tensor({b * c, 1, kInputLength}, 0.0));
  ModelParams fresh = ModelParams::init(cfg, 1);
  Var z0 = temporal_encoder(zeros, p2, fresh, cfg, c, Mode::eval, ops2);
  for (double v : z0.value().data()) CHECK(v == 0.0);

  randomize_bn(params, 4);
  auto eval_once = [&] {
    Tape te;
    BoundParams pe(te, params, false);
    OpRngStream o(CounterRng(1));
    return temporal_encoder(te.constant(Tensor({b * c, 1, kInputLength}, batch.node_features)), pe, params, cfg, c,
                            Mode::eval, o)
        .value();
  };
  const Tensor e1 = eval_once(), e2 = eval_once();
  CHECK(max_abs_diff(e1, e2) == 0.0);

  Tape t3;
  BoundParams p3(t3, params, false);
  OpRngStream o3(CounterRng(1));
  CHECK_THROWS_AS(temporal_encoder(t3.constant(Tensor({2, 1, 128}, 0.0)), p3, params, cfg, c, Mode::eval, o3),
                  ShapeError);
}

TEST_CASE("temporal dropout") {
  Tape t;
  Tensor zv = random_tensor({50, 8, 4}, 1);
  Var z = t.constant(zv);
  CHECK(temporal_dropout(z, 0.0, Mode::train, false, CounterRng(1)).id == z.id);
  CHECK(temporal_dropout(z, 0.4, Mode::eval, false, CounterRng(1)).id == z.id);
  CHECK_THROWS_AS(temporal_dropout(z, 1.0, Mode::train, false, CounterRng(1)), ParameterError);

  SUBCASE("masked fraction and exact zeros") {
    const std::size_t nodes = 12500, segs = 8;
    Tensor ones({nodes, segs, 3}, 1.0);
    Tensor y = temporal_dropout(t.constant(ones), 0.25, Mode::train, false, CounterRng(77)).value();
    std::size_t masked = 0;
    for (std::size_t n = 0; n < nodes; ++n)
      for (std::size_t s = 0; s < segs; ++s) {
        const double a = y.at(n, s, 0);
        CHECK((a == 0.0 || a == 1.0));
        if (a == 0.0) {
          ++masked;
          CHECK((y.at(n, s, 1) == 0.0 && y.at(n, s, 2) == 0.0));
        } else {
          CHECK((y.at(n, s, 1) == 1.0 && y.at(n, s, 2) == 1.0));
        }
      }
    CHECK(std::abs(static_cast<double>(masked) / (nodes * segs) - 0.25) <= 0.01);
  }
  SUBCASE("rescaled survivors") {
    Tensor y = temporal_dropout(z, 0.5, Mode::train, true, CounterRng(5)).value();
    for (std::size_t i = 0; i < y.numel(); ++i) CHECK((y[i] == 0.0 || std::abs(y[i] - 2.0 * zv[i]) < 1e-15));
  }
}

TEST_CASE("temporal attention") {
  Tape t;
  Tensor zv = random_tensor({5, 6, 4}, 2, -2, 2);
  Var z = t.constant(zv);
  Var q0 = t.constant(Tensor({4}, 0.0));
  AttentionOut a0 = temporal_attention(z, &q0);
  Tensor mean = mean_pool(z, 1).value();
  for (double v : a0.beta.value().data()) CHECK(std::abs(v - 1.0 / 6.0) < 1e-15);
  CHECK(max_abs_diff(a0.pooled.value(), mean) < 1e-12);
  AttentionOut off = temporal_attention(z, nullptr);
  CHECK(max_abs_diff(off.pooled.value(), mean) < 1e-12);

  Var single = t.constant(random_tensor({3, 1, 4}, 3));
  Var q = t.constant(random_tensor({4}, 4));
  AttentionOut a1 = temporal_attention(single, &q);
  for (double v : a1.beta.value().data()) CHECK(v == 1.0);
  CHECK(max_abs_diff(a1.pooled.value(), single.value().reshaped({3, 4})) == 0.0);

  SUBCASE("direct formula oracle") {
    const Tensor qv = q.value();
    AttentionOut a = temporal_attention(z, &q);
    double worst = 0.0, worst_sum = 0.0;
    for (std::size_t n = 0; n < 5; ++n) {
      std::vector<double> s(6);
      for (std::size_t tt = 0; tt < 6; ++tt)
        for (std::size_t f = 0; f < 4; ++f) s[tt] += qv[f] * zv.at(n, tt, f);
      const double mx = *std::max_element(s.begin(), s.end());
      double den = 0;
      for (double v : s) den += std::exp(v - mx);
      double bsum = 0;
      for (std::size_t tt = 0; tt < 6; ++tt) {
        const double beta = std::exp(s[tt] - mx) / den;
        worst = std::max(worst, std::abs(beta - a.beta.value().at(n, tt)));
        bsum += a.beta.value().at(n, tt);
        CHECK(a.beta.value().at(n, tt) >= 0.0);
      }
      worst_sum = std::max(worst_sum, std::abs(bsum - 1.0));
      for (std::size_t f = 0; f < 4; ++f) {
        double pooled = 0;
        for (std::size_t tt = 0; tt < 6; ++tt) pooled += std::exp(s[tt] - mx) / den * zv.at(n, tt, f);
        worst = std::max(worst, std::abs(pooled - a.pooled.value().at(n, f)));
      }
    }
    CHECK(worst < 1e-12);
    CHECK(worst_sum < 1e-12);
  }
  SUBCASE("constant score shift leaves beta unchanged") {
    // adding v to every z_t shifts every score by q.v
    const Tensor qv = q.value();
    Tensor shifted = zv;
    const double v[4] = {0.7, -1.3, 2.0, 0.4};
    for (std::size_t n = 0; n < 5; ++n)
      for (std::size_t tt = 0; tt < 6; ++tt)
        for (std::size_t f = 0; f < 4; ++f) shifted.at(n, tt, f) += v[f];
    AttentionOut a = temporal_attention(z, &q);
    AttentionOut b = temporal_attention(t.constant(shifted), &q);
    CHECK(max_abs_diff(a.beta.value(), b.beta.value()) < 1e-12);
  }
}

TEST_CASE("gatv2 layer") {
  auto make = [](Tape& t, std::size_t fin, std::size_t heads, std::size_t fh, bool concat, std::uint64_t s) {
    const std::size_t out = concat ? heads * fh : fh;
    return GatLayerVars{t.constant(random_tensor({fin, heads * fh}, s)),
                        t.constant(random_tensor({fin, heads * fh}, s + 1)),
                        t.constant(random_tensor({heads, fh}, s + 2)),
                        t.constant(random_tensor({out}, s + 3, 0.5, 1.5)),
                        t.constant(random_tensor({out}, s + 4)),
                        t.constant(Tensor::from({0.3}))};
  };

  SUBCASE("single node with a self-loop") {
    Tape t;
    GatLayerVars v = make(t, 3, 2, 2, true, 10);
    Var h = t.constant(random_tensor({1, 3}, 11));
    GatOut o = gatv2_layer(h, {{0, 0}}, v, 2, true);
    for (double a : o.alpha.value().data()) CHECK(a == 1.0);
    Var ref = prelu(layer_norm(matmul(h, v.wr), v.ln_gamma, v.ln_beta), v.prelu, 1);
    CHECK(max_abs_diff(o.out.value(), ref.value()) < 1e-14);
  }
  SUBCASE("identical nodes attend uniformly") {
    Tape t;
    GatLayerVars v = make(t, 3, 2, 2, true, 20);
    Tensor row = random_tensor({1, 3}, 21);
    Tensor hv({2, 3});
    for (std::size_t k = 0; k < 3; ++k) hv.at(0, k) = hv.at(1, k) = row[k];
    GatOut o = gatv2_layer(t.constant(hv), full_edges(2), v, 2, true);
    for (double a : o.alpha.value().data()) CHECK(std::abs(a - 0.5) < 1e-15);
  }
  SUBCASE("brute-force oracle on random 4-node graphs") {
    double worst = 0.0;
    for (int draw = 0; draw < 20; ++draw)
      for (bool concat : {true, false}) {
        Tape t;
        const std::size_t heads = 1 + draw % 3;
        GatLayerVars v = make(t, 5, heads, 3, concat, 100 + draw);
        Tensor hv = random_tensor({4, 5}, 200 + draw, -2, 2);
        const auto edges = full_edges(4);
        GatOut o = gatv2_layer(t.constant(hv), edges, v, heads, concat);
        GatOracle ref = gat_oracle(hv, edges, v.wl.value(), v.wr.value(), v.att.value(), v.ln_gamma.value(),
                                   v.ln_beta.value(), 0.3, concat);
        for (std::size_t i = 0; i < 4; ++i)
          for (std::size_t k = 0; k < ref.out[i].size(); ++k)
            worst = std::max(worst, std::abs(o.out.value().at(i, k) - ref.out[i][k]));
        for (std::size_t hd = 0; hd < heads; ++hd)
          for (std::size_t e = 0; e < edges.size(); ++e)
            worst = std::max(worst, std::abs(o.alpha.value().at(hd, e) - ref.alpha[hd][e]));
      }
    CHECK(worst < 1e-10);
  }
  SUBCASE("node permutation equivariance") {
    Tape t;
    GatLayerVars v = make(t, 5, 4, 3, true, 300);
    Tensor hv = random_tensor({6, 5}, 301);
    const std::vector<std::size_t> perm = {3, 0, 5, 1, 4, 2};  // new row r holds old node perm[r]
    std::vector<std::size_t> inv(6);
    for (std::size_t r = 0; r < 6; ++r) inv[perm[r]] = r;
    Tensor hp({6, 5});
    for (std::size_t r = 0; r < 6; ++r)
      for (std::size_t k = 0; k < 5; ++k) hp.at(r, k) = hv.at(perm[r], k);
    auto edges = full_edges(6);
    std::vector<graph::Edge> pe;
    for (const auto& e : edges) pe.push_back({inv[e.src], inv[e.dst]});
    Tensor a = gatv2_layer(t.constant(hv), edges, v, 4, true).out.value();
    Tensor b = gatv2_layer(t.constant(hp), pe, v, 4, true).out.value();
    double worst = 0.0;
    for (std::size_t r = 0; r < 6; ++r)
      for (std::size_t k = 0; k < 12; ++k) worst = std::max(worst, std::abs(b.at(r, k) - a.at(perm[r], k)));
    CHECK(worst < 1e-12);
  }
  {
    Tape t;
    GatLayerVars v = make(t, 3, 1, 2, true, 400);
    CHECK_THROWS_AS(gatv2_layer(t.constant(random_tensor({2, 3}, 1)), {{0, 5}}, v, 1, true), IndexError);
  }
}

TEST_CASE("readout") {
  ModelConfig cfg = small_config();
  cfg.gat2_dim = 2;
  cfg.classifier_hidden = 2;
  ModelParams params = ModelParams::init(cfg, 1);
  params.at("cls.w1") = Tensor({2, 2}, std::vector<double>{0.5, -1.0, 0.25, 2.0});
  params.at("cls.b1") = Tensor::from({0.1, -0.2});
  params.at("cls.w2") = Tensor({2, 2}, std::vector<double>{1.0, 0.0, -0.5, 3.0});
  params.at("cls.b2") = Tensor::from({0.0, 0.05});
  Tape t;
  BoundParams p(t, params, false);

  // node rows (1, 2) and (3, -2): pooled (2, 0)
  Var h = t.constant(Tensor({2, 2}, std::vector<double>{1.0, 2.0, 3.0, -2.0}));
  Tensor logits = readout_classify(h, {0, 0}, 1, p, 0.3, Mode::eval, CounterRng(1)).value();
  // hidden pre-activation: (2*0.5 + 0.1, 2*-1 - 0.2) = (1.1, -2.2)
  const double e0 = 1.1, e1 = std::exp(-2.2) - 1.0;
  CHECK(std::abs(logits.at(0, 0) - (e0 * 1.0 + e1 * -0.5 + 0.0)) < 1e-12);
  CHECK(std::abs(logits.at(0, 1) - (e0 * 0.0 + e1 * 3.0 + 0.05)) < 1e-12);

  Var same = t.constant(Tensor({3, 2}, std::vector<double>{0.4, -0.1, 0.4, -0.1, 0.4, -0.1}));
  Tensor a = readout_classify(same, {0, 0, 0}, 1, p, 0.3, Mode::eval, CounterRng(1)).value();
  Tensor b = readout_classify(t.constant(Tensor({1, 2}, std::vector<double>{0.4, -0.1})), {0}, 1, p, 0.3,
                              Mode::eval, CounterRng(2))
                 .value();
  CHECK(max_abs_diff(a, b) < 1e-15);
  CHECK_THROWS_AS(readout_classify(same, {0, 0, 2}, 3, p, 0.3, Mode::eval, CounterRng(1)), ContractError);
}

TEST_CASE("model forward") {
  ModelConfig cfg = small_config();
  ModelParams params = ModelParams::init(cfg, 5);
  randomize_bn(params, 6);
  auto run = [&](const graph::GraphBatch& b, Mode mode, std::uint64_t seed) {
    Tape t;
    BoundParams p(t, params, false);
    return model_forward(t, b, p, params, cfg, mode, CounterRng(seed)).logits.value();
  };

  for (std::size_t b : {1u, 3u}) {
    const auto gs = random_graphs(b, 4, b);
    CHECK(run(graph::batch_graphs(gs), Mode::eval, 1).shape() == Shape{b, 2});
  }

  SUBCASE("block-diagonal independence") {
    const auto gs = random_graphs(3, 4, 40);
    const Tensor all = run(graph::batch_graphs(gs), Mode::eval, 1);
    for (std::size_t g = 0; g < 3; ++g) {
      const Tensor one = run(graph::batch_graphs(std::vector<graph::EEGGraph>{gs[g]}), Mode::eval, 1);
      for (std::size_t k = 0; k < 2; ++k) CHECK(std::abs(one.at(0, k) - all.at(g, k)) < 1e-9);
    }
  }
  SUBCASE("channel permutation invariance in eval mode") {
    auto gs = random_graphs(2, 4, 50);
    const Tensor a = run(graph::batch_graphs(gs), Mode::eval, 1);
    for (auto& g : gs) std::reverse(g.node_features.begin(), g.node_features.end());
    const Tensor b = run(graph::batch_graphs(gs), Mode::eval, 1);
    CHECK(max_abs_diff(a, b) < 1e-9);
  }
  SUBCASE("eval mode is a pure function") {
    const auto gs = random_graphs(2, 4, 60);
    const auto batch = graph::batch_graphs(gs);
    CHECK(max_abs_diff(run(batch, Mode::eval, 1), run(batch, Mode::eval, 99)) == 0.0);
    const Tensor t1 = run(batch, Mode::train, 7);
    params = ModelParams::init(cfg, 5);
    const Tensor t2 = run(batch, Mode::train, 7);
    CHECK(max_abs_diff(t1, t2) == 0.0);
  }
  SUBCASE("ablation arms") {
    ModelConfig off = cfg;
    off.enable_temporal_attention = false;
    off.enable_temporal_dropout = false;
    ModelParams po = ModelParams::init(off, 5);
    CHECK(po.scalar_count() + cfg.f3 == params.scalar_count());
    CHECK_FALSE(po.has("tattn.q"));
    const auto batch = graph::batch_graphs(random_graphs(2, 4, 70));
    Tape t;
    BoundParams p(t, po, false);
    ForwardOut o = model_forward(t, batch, p, po, off, Mode::train, CounterRng(3));
    CHECK(o.logits.shape() == Shape{2, 2});
    for (double v : o.beta.value().data()) CHECK(v == 1.0 / 8.0);
    Tape t2;
    BoundParams p2(t2, po, false);
    CHECK_THROWS_AS(model_forward(t2, batch, p2, po, cfg, Mode::train, CounterRng(3)), ContractError);

    // temporal dropout alone changes nothing in eval mode
    ModelConfig no_drop = cfg;
    no_drop.enable_temporal_dropout = false;
    CHECK(max_abs_diff(run(batch, Mode::eval, 1), [&] {
            Tape te;
            BoundParams pe(te, params, false);
            return model_forward(te, batch, pe, params, no_drop, Mode::eval, CounterRng(1)).logits.value();
          }()) == 0.0);
  }
}

TEST_CASE("end-to-end gradient check on every parameter group") {
  ModelConfig cfg = small_config();
  cfg.temporal_dropout_p = 0.25;
  ModelParams params = ModelParams::init(cfg, 11);
  const auto batch = graph::batch_graphs(random_graphs(2, 4, 12));
  std::vector<Tensor> inputs;
  for (const auto& t : params.tensors) inputs.push_back(t.value);

  ScalarFn loss = [&](Tape& t, const std::vector<Var>& vars) {
    BoundParams p(params, vars);
    ForwardOut o = model_forward(t, batch, p, params, cfg, Mode::train, CounterRng(21));
    return cross_entropy(t, o.logits, batch.labels);
  };
  GradCheckOptions opts;
  opts.max_coords_per_input = 24;
  const GradCheckResult r = grad_check(loss, inputs, opts);
  INFO("worst group " << params.tensors[r.worst_input].name << " index " << r.worst_index << " analytic "
                      << r.analytic << " numeric " << r.numeric);
  CHECK(r.max_rel_error < 1e-4);
}

TEST_CASE("checkpoint round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "tgat_test_ckpt";
  std::filesystem::remove_all(dir);
  Checkpoint c;
  c.config = small_config();
  c.params = ModelParams::init(c.config, 3);
  randomize_bn(c.params, 4);
  c.seed = 42;
  c.extra = {{"fold", 2}};
  save_checkpoint(dir / "m.ckpt", c);
  Checkpoint back = load_checkpoint(dir / "m.ckpt");
  CHECK(back.seed == 42);
  CHECK(back.extra["fold"] == 2);
  REQUIRE(back.params.tensors.size() == c.params.tensors.size());
  for (std::size_t i = 0; i < c.params.tensors.size(); ++i) {
    CHECK(back.params.tensors[i].name == c.params.tensors[i].name);
    CHECK(back.params.tensors[i].value.vec() == c.params.tensors[i].value.vec());
  }
  for (std::size_t s = 0; s < 3; ++s) CHECK(back.params.bn[s].running_var.vec() == c.params.bn[s].running_var.vec());

  // a tensor whose shape disagrees with the config is rejected
  Checkpoint wrong = c;
  wrong.params.at("cls.b2") = Tensor({3}, 0.0);
  save_checkpoint(dir / "bad.ckpt", wrong);
  CHECK_THROWS_AS(load_checkpoint(dir / "bad.ckpt"), DataError);
  std::filesystem::resize_file(dir / "m.ckpt", std::filesystem::file_size(dir / "m.ckpt") - 8);
  CHECK_THROWS_AS(load_checkpoint(dir / "m.ckpt"), DataError);
  CHECK_THROWS_AS(load_checkpoint(dir / "missing.ckpt"), IoError);
  std::filesystem::remove_all(dir);
}
