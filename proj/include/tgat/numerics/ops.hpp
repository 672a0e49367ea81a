#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "tgat/numerics/rng.hpp"
#include "tgat/numerics/tape.hpp"
#include "tgat/numerics/tensor.hpp"

namespace tgat::numerics {

enum class Mode { train, eval };

// ---- linear algebra / shape ----------------------------------------------

Var matmul(Var a, Var b);
/// a: [B x m x k], b: [B x k x n] -> [B x m x n]
Var batched_matmul(Var a, Var b);
Var add(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var x, double factor);
/// Adds bias[n] to every length-n row of x (last axis).
Var add_bias(Var x, Var bias);
/// Multiplies every last-axis vector of x by the matching entry of s, whose
/// shape equals x's shape without its last axis.
Var scale_by(Var x, Var s);
Var sum(Var x);
/// Elementwise natural log; non-positive entries raise NumericError.
Var log(Var x);
Var reshape(Var x, Shape shape);
Var permute3(Var x, std::array<std::size_t, 3> perm);

// ---- reductions / normalisation ------------------------------------------

/// Numerically stable softmax along `axis` (max-subtracted).
Var softmax(Var x, std::size_t axis);
/// Arithmetic mean along `axis`; the axis is removed (rank-1 input -> [1]).
Var mean_pool(Var x, std::size_t axis);
/// Mean over the last axis of a [rows x D] tensor, then gamma * xhat + beta.
Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5);

struct BatchNormState {
  Tensor running_mean;
  Tensor running_var;
  double momentum = 0.1;
  double eps = 1e-5;

  static BatchNormState fresh(std::size_t channels);
};

/// Channel axis 1 of [N x F] or [N x F x T]. Train mode uses batch statistics
/// and updates `state` (running variance uses the unbiased estimator);
/// eval mode uses the running statistics.
Var batch_norm(Var x, Var gamma, Var beta, BatchNormState& state, Mode mode);

// ---- activations ------------------------------------------------------------

/// slope: [1] (shared) or [dim(channel_axis)] (per channel).
Var prelu(Var x, Var slope, std::size_t channel_axis = 1);
Var elu(Var x, double alpha = 1.0);
Var leaky_relu(Var x, double slope = 0.2);

// ---- convolution ------------------------------------------------------------

/// x: [N x F_in x T], kernel: [F_out x F_in x k]; stride 1, "same" zero padding.
Var conv_temporal(Var x, Var kernel);

/// x: [(B*C) x F x T] with nodes of each graph contiguous; kernel: [F x k].
/// Each feature map is correlated with its own kernel along the node axis of
/// its graph ("same" padding, no mixing across maps or graphs).
Var depthwise_conv_spatial(Var x, Var kernel, std::size_t nodes_per_graph);

// ---- stochastic regularisation --------------------------------------------

enum class DropoutGranularity { element, channel };

/// Inverted dropout. `channel` drops whole last-axis vectors. Eval mode and
/// p == 0 return `x` itself.
Var dropout(Var x, double p, DropoutGranularity granularity, Mode mode, CounterRng rng);

// ---- graph / segment primitives --------------------------------------------

/// rows of x [N x D] picked by idx -> [E x D]
Var gather_rows(Var x, const std::vector<std::size_t>& idx);
/// out[idx[e]] += x[e] for x [E x D] -> [rows x D]
Var scatter_add_rows(Var x, const std::vector<std::size_t>& idx, std::size_t rows);
/// Softmax along axis 1 of [H x E], separately within each group of columns
/// sharing a segment id.
Var segment_softmax(Var x, const std::vector<std::size_t>& segment, std::size_t segments);
/// Mean of the rows of x [N x D] sharing a group id -> [groups x D].
Var segment_mean(Var x, const std::vector<std::size_t>& group, std::size_t groups);

}  // namespace tgat::numerics
