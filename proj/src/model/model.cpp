#include "tgat/model/model.hpp"

#include "tgat/error.hpp"

namespace tgat::model {

using namespace numerics;

Var temporal_encoder(Var x, const BoundParams& p, ModelParams& state, const ModelConfig& cfg,
                     std::size_t nodes_per_graph, Mode mode, OpRngStream& rng) {
  if (x.value().rank() != 3 || x.dim(1) != 1 || x.dim(2) != kInputLength)
    throw ShapeError("temporal_encoder: expected [N x 1 x " + std::to_string(kInputLength) + "], got " +
                     shape_str(x.shape()));
  Var h = x;
  for (std::size_t s = 0; s < 3; ++s) {
    const std::string n = std::to_string(s + 1);
    h = conv_temporal(h, p("enc.conv" + n + ".w"));
    h = batch_norm(h, p("enc.bn" + n + ".gamma"), p("enc.bn" + n + ".beta"), state.bn[s], mode);
    h = prelu(h, p("enc.prelu" + n), 1);
    h = dropout(h, cfg.spatial_dropout, DropoutGranularity::channel, mode, rng.next());
  }
  h = depthwise_conv_spatial(h, p("enc.spatial.w"), nodes_per_graph);

  const std::size_t n = h.dim(0), f = h.dim(1), t = cfg.temporal_segments;
  Var chunks = reshape(h, {n, f, t, kInputLength / t});
  return permute3(mean_pool(chunks, 3), {0, 2, 1});
}

Var temporal_dropout(Var z, double p, Mode mode, bool rescale, CounterRng rng) {
  if (!(p >= 0.0 && p < 1.0)) throw ParameterError("temporal_dropout: p must lie in [0, 1)");
  if (mode == Mode::eval || p == 0.0) return z;
  if (z.value().rank() != 3) throw ShapeError("temporal_dropout: expected [N x T x F], got " + shape_str(z.shape()));
  const double keep = rescale ? 1.0 / (1.0 - p) : 1.0;
  Tensor mask({z.dim(0), z.dim(1)});
  for (std::size_t i = 0; i < mask.numel(); ++i) mask[i] = rng.bernoulli(p) ? 0.0 : keep;
  return scale_by(z, z.tape->constant(std::move(mask)));
}

AttentionOut temporal_attention(Var z, const Var* q) {
  if (z.value().rank() != 3 || z.dim(1) == 0)
    throw ShapeError("temporal_attention: expected [N x T x F] with T >= 1, got " + shape_str(z.shape()));
  const std::size_t n = z.dim(0), t = z.dim(1), f = z.dim(2);
  Var beta;
  if (q != nullptr) {
    Var scores = reshape(matmul(reshape(z, {n * t, f}), reshape(*q, {f, 1})), {n, t});
    beta = softmax(scores, 1);
  } else {
    beta = z.tape->constant(Tensor({n, t}, 1.0 / static_cast<double>(t)));
  }
  Var pooled = reshape(batched_matmul(reshape(beta, {n, 1, t}), z), {n, f});
  return {beta, pooled};
}

GatOut gatv2_layer(Var h, const std::vector<graph::Edge>& edges, const GatLayerVars& v, std::size_t heads,
                   bool concat) {
  const std::size_t n = h.dim(0);
  const std::size_t width = v.wl.dim(1);
  if (heads == 0 || width % heads != 0 || v.att.dim(0) != heads || v.att.dim(1) != width / heads)
    throw ShapeError("gatv2_layer: attention vector " + shape_str(v.att.shape()) + " does not match " +
                     std::to_string(heads) + " heads over width " + std::to_string(width));
  const std::size_t fh = width / heads, e = edges.size();

  std::vector<std::size_t> src(e), dst(e);
  for (std::size_t k = 0; k < e; ++k) {
    src[k] = edges[k].src;
    dst[k] = edges[k].dst;
  }

  Var xl = matmul(h, v.wl);
  Var xr = matmul(h, v.wr);
  Var xr_src = gather_rows(xr, src);
  Var g = leaky_relu(add(gather_rows(xl, dst), xr_src), 0.2);
  Var per_head = permute3(reshape(g, {e, heads, fh}), {1, 0, 2});  // [H x E x Fh]
  Var scores = reshape(batched_matmul(per_head, reshape(v.att, {heads, fh, 1})), {heads, e});
  Var alpha = segment_softmax(scores, dst, n);

  Var alpha_eh = reshape(permute3(reshape(alpha, {heads, e, 1}), {1, 0, 2}), {e, heads});
  Var msg = reshape(scale_by(reshape(xr_src, {e, heads, fh}), alpha_eh), {e, width});
  Var out = scatter_add_rows(msg, dst, n);
  if (!concat && heads > 1) out = mean_pool(reshape(out, {n, heads, fh}), 1);

  out = layer_norm(out, v.ln_gamma, v.ln_beta);
  out = prelu(out, v.prelu, 1);
  return {out, alpha};
}

GatLayerVars gat_vars(const BoundParams& p, int layer) {
  const std::string l = "gat" + std::to_string(layer);
  return {p(l + ".wl"), p(l + ".wr"), p(l + ".att"), p(l + ".ln.gamma"), p(l + ".ln.beta"), p(l + ".prelu")};
}

Var readout_classify(Var h, const std::vector<std::size_t>& membership, std::size_t graphs, const BoundParams& p,
                     double dropout_p, Mode mode, CounterRng rng) {
  Var pooled = segment_mean(h, membership, graphs);
  Var z = elu(add_bias(matmul(pooled, p("cls.w1")), p("cls.b1")), 1.0);
  z = dropout(z, dropout_p, DropoutGranularity::element, mode, rng);
  return add_bias(matmul(z, p("cls.w2")), p("cls.b2"));
}

ForwardOut model_forward(Tape& tape, const graph::GraphBatch& batch, const BoundParams& p, ModelParams& state,
                         const ModelConfig& cfg, Mode mode, CounterRng rng) {
  if (batch.feature_length != kInputLength)
    throw ShapeError("model_forward: node features of length " + std::to_string(batch.feature_length) +
                     ", expected " + std::to_string(kInputLength));
  if (cfg.enable_temporal_attention != p.has("tattn.q"))
    throw ContractError("model_forward: parameters and config disagree on temporal attention");
  OpRngStream ops(rng);
  const std::size_t n = batch.num_nodes();
  Var x = tape.constant(Tensor({n, 1, kInputLength}, batch.node_features));

  Var z = temporal_encoder(x, p, state, cfg, batch.nodes_per_graph, mode, ops);
  const CounterRng tdrop_rng = ops.next();
  if (cfg.enable_temporal_dropout)
    z = temporal_dropout(z, cfg.temporal_dropout_p, mode, cfg.rescale_temporal_dropout, tdrop_rng);

  Var q;
  if (cfg.enable_temporal_attention) q = p("tattn.q");
  AttentionOut att = temporal_attention(z, cfg.enable_temporal_attention ? &q : nullptr);

  Var h = gatv2_layer(att.pooled, batch.edges, gat_vars(p, 1), cfg.gat1_heads, cfg.gat1_concat).out;
  h = gatv2_layer(h, batch.edges, gat_vars(p, 2), 1, true).out;
  Var logits = readout_classify(h, batch.membership, batch.num_graphs, p, cfg.classifier_dropout, mode, ops.next());
  return {logits, att.beta};
}

}  // namespace tgat::model
