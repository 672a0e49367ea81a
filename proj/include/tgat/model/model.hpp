#pragma once

#include <cstddef>
#include <vector>

#include "tgat/graph/graph.hpp"
#include "tgat/model/config.hpp"
#include "tgat/model/params.hpp"
#include "tgat/numerics/ops.hpp"
#include "tgat/numerics/rng.hpp"

namespace tgat::model {

using numerics::CounterRng;
using numerics::Mode;
using numerics::OpRngStream;

/// x: [N x 1 x 256] node signals, nodes of each graph contiguous.
/// Three conv -> batch norm -> PReLU -> spatial dropout stages, the depthwise
/// spatial conv, then mean pooling into contiguous chunks: [N x T_seg x F3].
Var temporal_encoder(Var x, const BoundParams& p, ModelParams& state, const ModelConfig& cfg,
                     std::size_t nodes_per_graph, Mode mode, OpRngStream& rng);

/// Zeroes each (node, segment) feature vector of z [N x T x F] with
/// probability p in train mode; survivors scaled by 1/(1-p) only if `rescale`.
Var temporal_dropout(Var z, double p, Mode mode, bool rescale, CounterRng rng);

struct AttentionOut {
  Var beta;    // [N x T]
  Var pooled;  // [N x F]
};

/// beta = softmax_t(q . z_t), pooled = sum_t beta_t z_t. Without q the
/// weights are the constant 1/T, i.e. a plain mean over segments.
AttentionOut temporal_attention(Var z, const Var* q);

struct GatLayerVars {
  Var wl, wr;          // [F_in x H*F_head]
  Var att;             // [H x F_head]
  Var ln_gamma, ln_beta;
  Var prelu;           // [1]
};

struct GatOut {
  Var out;    // [N x F_out]
  Var alpha;  // [H x E], edge order of `edges`
};

/// GATv2 attention over `edges` (src j -> dst i):
///   e_ij = a . LeakyReLU_0.2(W_l h_i + W_r h_j),  alpha = softmax_j(e_ij),
///   out_i = sum_j alpha_ij W_r h_j,
/// heads concatenated or averaged, then layer norm and PReLU.
GatOut gatv2_layer(Var h, const std::vector<graph::Edge>& edges, const GatLayerVars& v, std::size_t heads,
                   bool concat);

GatLayerVars gat_vars(const BoundParams& p, int layer);

/// Per-graph mean over nodes -> linear -> ELU -> dropout -> linear.
Var readout_classify(Var h, const std::vector<std::size_t>& membership, std::size_t graphs, const BoundParams& p,
                     double dropout_p, Mode mode, CounterRng rng);

struct ForwardOut {
  Var logits;  // [B x classes]
  Var beta;    // [N x T_seg] attention weights (constant uniform when disabled)
};

ForwardOut model_forward(numerics::Tape& tape, const graph::GraphBatch& batch, const BoundParams& p,
                         ModelParams& state, const ModelConfig& cfg, Mode mode, CounterRng rng);

}  // namespace tgat::model
