#include "tgat/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tgat/error.hpp"
#include "tgat/numerics/kernels.hpp"

namespace tgat::numerics {

namespace {

Tape& tape_of(Var v) {
  if (v.tape == nullptr) throw ContractError("Var is not bound to a tape");
  return *v.tape;
}

Tape& tape_of(Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape) throw ContractError("operands live on different tapes");
  return *a.tape;
}

void accumulate(Tensor* sink, const Tensor& src) {
  double* d = sink->ptr();
  const double* s = src.ptr();
  for (std::size_t i = 0; i < src.numel(); ++i) d[i] += s[i];
}

void accumulate(Tensor* sink, const std::vector<double>& src) {
  double* d = sink->ptr();
  for (std::size_t i = 0; i < src.size(); ++i) d[i] += src[i];
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
}

void require_rank(const char* op, const Tensor& t, std::size_t rank) {
  if (t.rank() != rank)
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " + shape_str(t.shape()));
}

// [outer, axis, inner] view of a tensor around `axis`.
struct AxisView {
  std::size_t outer = 1, len = 1, inner = 1;
};

AxisView axis_view(const Shape& s, std::size_t axis) {
  if (axis >= s.size())
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + shape_str(s));
  AxisView v;
  for (std::size_t i = 0; i < axis; ++i) v.outer *= s[i];
  v.len = s[axis];
  for (std::size_t i = axis + 1; i < s.size(); ++i) v.inner *= s[i];
  return v;
}

}  // namespace

BatchNormState BatchNormState::fresh(std::size_t channels) {
  BatchNormState s;
  s.running_mean = Tensor({channels}, 0.0);
  s.running_var = Tensor({channels}, 1.0);
  return s;
}

// ---------------------------------------------------------------------------

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.rank() != 2 || B.rank() != 2 || A.dim(1) != B.dim(0))
    throw ShapeError("matmul: incompatible shapes " + shape_str(A.shape()) + " and " + shape_str(B.shape()));
  const std::size_t m = A.dim(0), k = A.dim(1), n = B.dim(1);
  Tensor C({m, n});
  kernels::matmul(m, k, n, A.ptr(), B.ptr(), C.ptr());
  return t.record("matmul", std::move(C), {a, b}, [ai = a.id, bi = b.id, m, k, n](Tape& tp, const Tensor& g) {
    if (Tensor* ga = tp.grad_sink(ai)) {
      std::vector<double> tmp(m * k);
      kernels::matmul_nt(m, n, k, g.ptr(), tp.value(bi).ptr(), tmp.data());
      accumulate(ga, tmp);
    }
    if (Tensor* gb = tp.grad_sink(bi)) {
      std::vector<double> tmp(k * n);
      kernels::matmul_tn(k, m, n, tp.value(ai).ptr(), g.ptr(), tmp.data());
      accumulate(gb, tmp);
    }
  });
}

Var batched_matmul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.rank() != 3 || B.rank() != 3 || A.dim(0) != B.dim(0) || A.dim(2) != B.dim(1))
    throw ShapeError("batched_matmul: incompatible shapes " + shape_str(A.shape()) + " and " +
                     shape_str(B.shape()));
  const std::size_t bs = A.dim(0), m = A.dim(1), k = A.dim(2), n = B.dim(2);
  Tensor C({bs, m, n});
  for (std::size_t q = 0; q < bs; ++q)
    kernels::matmul(m, k, n, A.ptr() + q * m * k, B.ptr() + q * k * n, C.ptr() + q * m * n);
  return t.record("batched_matmul", std::move(C), {a, b},
                  [ai = a.id, bi = b.id, bs, m, k, n](Tape& tp, const Tensor& g) {
                    if (Tensor* ga = tp.grad_sink(ai)) {
                      std::vector<double> tmp(m * k);
                      for (std::size_t q = 0; q < bs; ++q) {
                        kernels::matmul_nt(m, n, k, g.ptr() + q * m * n, tp.value(bi).ptr() + q * k * n, tmp.data());
                        for (std::size_t i = 0; i < m * k; ++i) (*ga)[q * m * k + i] += tmp[i];
                      }
                    }
                    if (Tensor* gb = tp.grad_sink(bi)) {
                      std::vector<double> tmp(k * n);
                      for (std::size_t q = 0; q < bs; ++q) {
                        kernels::matmul_tn(k, m, n, tp.value(ai).ptr() + q * m * k, g.ptr() + q * m * n, tmp.data());
                        for (std::size_t i = 0; i < k * n; ++i) (*gb)[q * k * n + i] += tmp[i];
                      }
                    }
                  });
}

Var add(Var a, Var b) {
  Tape& t = tape_of(a, b);
  require_same_shape("add", a.value(), b.value());
  Tensor out = a.value();
  out.requires_grad = false;
  const Tensor& B = b.value();
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] += B[i];
  return t.record("add", std::move(out), {a, b}, [ai = a.id, bi = b.id](Tape& tp, const Tensor& g) {
    if (Tensor* ga = tp.grad_sink(ai)) accumulate(ga, g);
    if (Tensor* gb = tp.grad_sink(bi)) accumulate(gb, g);
  });
}

Var mul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  require_same_shape("mul", a.value(), b.value());
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  Tensor out(A.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = A[i] * B[i];
  return t.record("mul", std::move(out), {a, b}, [ai = a.id, bi = b.id](Tape& tp, const Tensor& g) {
    if (Tensor* ga = tp.grad_sink(ai)) {
      const Tensor& B = tp.value(bi);
      for (std::size_t i = 0; i < g.numel(); ++i) (*ga)[i] += g[i] * B[i];
    }
    if (Tensor* gb = tp.grad_sink(bi)) {
      const Tensor& A = tp.value(ai);
      for (std::size_t i = 0; i < g.numel(); ++i) (*gb)[i] += g[i] * A[i];
    }
  });
}

Var scale(Var x, double factor) {
  Tape& t = tape_of(x);
  Tensor out(x.shape());
  const Tensor& X = x.value();
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = X[i] * factor;
  return t.record("scale", std::move(out), {x}, [xi = x.id, factor](Tape& tp, const Tensor& g) {
    if (Tensor* gx = tp.grad_sink(xi))
      for (std::size_t i = 0; i < g.numel(); ++i) (*gx)[i] += g[i] * factor;
  });
}

Var add_bias(Var x, Var bias) {
  Tape& t = tape_of(x, bias);
  const Tensor& X = x.value();
  const Tensor& b = bias.value();
  const std::size_t n = X.shape().back();
  if (b.numel() != n)
    throw ShapeError("add_bias: bias " + shape_str(b.shape()) + " does not match last axis of " + shape_str(X.shape()));
  Tensor out(X.shape());
  for (std::size_t i = 0; i < X.numel(); ++i) out[i] = X[i] + b[i % n];
  return t.record("add_bias", std::move(out), {x, bias}, [xi = x.id, bi = bias.id, n](Tape& tp, const Tensor& g) {
    if (Tensor* gx = tp.grad_sink(xi)) accumulate(gx, g);
    if (Tensor* gb = tp.grad_sink(bi))
      for (std::size_t i = 0; i < g.numel(); ++i) (*gb)[i % n] += g[i];
  });
}

Var scale_by(Var x, Var s) {
  Tape& t = tape_of(x, s);
  const Tensor& X = x.value();
  const Tensor& S = s.value();
  const std::size_t len = X.shape().back();
  if (X.numel() / len != S.numel())
    throw ShapeError("scale_by: scale " + shape_str(S.shape()) + " does not match leading axes of " +
                     shape_str(X.shape()));
  Tensor out(X.shape());
  for (std::size_t r = 0; r < S.numel(); ++r)
    for (std::size_t j = 0; j < len; ++j) out[r * len + j] = X[r * len + j] * S[r];
  return t.record("scale_by", std::move(out), {x, s}, [xi = x.id, si = s.id, len](Tape& tp, const Tensor& g) {
    const Tensor& S = tp.value(si);
    if (Tensor* gx = tp.grad_sink(xi))
      for (std::size_t r = 0; r < S.numel(); ++r)
        for (std::size_t j = 0; j < len; ++j) (*gx)[r * len + j] += g[r * len + j] * S[r];
    if (Tensor* gs = tp.grad_sink(si)) {
      const Tensor& X = tp.value(xi);
      for (std::size_t r = 0; r < S.numel(); ++r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < len; ++j) acc += g[r * len + j] * X[r * len + j];
        (*gs)[r] += acc;
      }
    }
  });
}

Var sum(Var x) {
  Tape& t = tape_of(x);
  double s = 0.0;
  for (double v : x.value().data()) s += v;
  return t.record("sum", Tensor::scalar(s), {x}, [xi = x.id](Tape& tp, const Tensor& g) {
    if (Tensor* gx = tp.grad_sink(xi))
      for (std::size_t i = 0; i < gx->numel(); ++i) (*gx)[i] += g[0];
  });
}

Var log(Var x) {
  Tape& t = tape_of(x);
  const Tensor& X = x.value();
  Tensor out(X.shape());
  for (std::size_t i = 0; i < X.numel(); ++i) {
    if (!(X[i] > 0.0)) throw NumericError("log: non-positive input " + std::to_string(X[i]));
    out[i] = std::log(X[i]);
  }
  return t.record("log", std::move(out), {x}, [xi = x.id](Tape& tp, const Tensor& g) {
    if (Tensor* gx = tp.grad_sink(xi)) {
      const Tensor& X = tp.value(xi);
      for (std::size_t i = 0; i < g.numel(); ++i) (*gx)[i] += g[i] / X[i];
    }
  });
}

Var reshape(Var x, Shape shape) {
  Tape& t = tape_of(x);
  Tensor out = x.value().reshaped(std::move(shape));
  out.requires_grad = false;
  return t.record("reshape", std::move(out), {x}, [xi = x.id](Tape& tp, const Tensor& g) {
    if (Tensor* gx = tp.grad_sink(xi)) accumulate(gx, g);
  });
}

Var permute3(Var x, std::array<std::size_t, 3> perm) {
  Tape& t = tape_of(x);
  const Tensor& X = x.value();
  require_rank("permute3", X, 3);
  std::array<bool, 3> seen{};
  for (auto p : perm) {
    if (p > 2 || seen[p]) throw ParameterError("permute3: invalid permutation");
    seen[p] = true;
  }
  const Shape& in = X.shape();
  const Shape out_shape{in[perm[0]], in[perm[1]], in[perm[2]]};
  const std::array<std::size_t, 3> in_stride{in[1] * in[2], in[2], 1};
  // stride in the input of each output axis
  const std::array<std::size_t, 3> st{in_stride[perm[0]], in_stride[perm[1]], in_stride[perm[2]]};
  Tensor out(out_shape);
  std::size_t o = 0;
  for (std::size_t i = 0; i < out_shape[0]; ++i)
    for (std::size_t j = 0; j < out_shape[1]; ++j)
      for (std::size_t k = 0; k < out_shape[2]; ++k) out[o++] = X[i * st[0] + j * st[1] + k * st[2]];
  return t.record("permute3", std::move(out), {x}, [xi = x.id, out_shape, st](Tape& tp, const Tensor& g) {
    if (Tensor* gx = tp.grad_sink(xi)) {
      std::size_t o = 0;
      for (std::size_t i = 0; i < out_shape[0]; ++i)
        for (std::size_t j = 0; j < out_shape[1]; ++j)
          for (std::size_t k = 0; k < out_shape[2]; ++k) (*gx)[i * st[0] + j * st[1] + k * st[2]] += g[o++];
    }
  });
}

// ---------------------------------------------------------------------------

Var softmax(Var x, std::size_t axis) {
  Tape& t = tape_of(x);
  const Tensor& X = x.value();
  const AxisView v = axis_view(X.shape(), axis);
  Tensor out(X.shape());
  for (std::size_t o = 0; o < v.outer; ++o)
    for (std::size_t in = 0; in < v.inner; ++in) {
      const std::size_t base = o * v.len * v.inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < v.len; ++j) {
        const double xv = X[base + j * v.inner];
        if (std::isnan(xv)) throw NumericError("softmax: NaN in input");
        mx = std::max(mx, xv);
      }
      double s = 0.0;
      for (std::size_t j = 0; j < v.len; ++j) {
        const double e = std::exp(X[base + j * v.inner] - mx);
        out[base + j * v.inner] = e;
        s += e;
      }
      for (std::size_t j = 0; j < v.len; ++j) out[base + j * v.inner] /= s;
    }
  const std::size_t self = t.size();
  return t.record("softmax", std::move(out), {x}, [xi = x.id, self, v](Tape& tp, const Tensor& g) {
    Tensor* gx = tp.grad_sink(xi);
    if (gx == nullptr) return;
    const Tensor& Y = tp.value(self);
    for (std::size_t o = 0; o < v.outer; ++o)
      for (std::size_t in = 0; in < v.inner; ++in) {
        const std::size_t base = o * v.len * v.inner + in;
        double dot = 0.0;
        for (std::size_t j = 0; j < v.len; ++j) dot += g[base + j * v.inner] * Y[base + j * v.inner];
        for (std::size_t j = 0; j < v.len; ++j) {
          const std::size_t p = base + j * v.inner;
          (*gx)[p] += Y[p] * (g[p] - dot);
        }
      }
  });
}

Var mean_pool(Var x, std::size_t axis) {
  Tape& t = tape_of(x);
  const Tensor& X = x.value();
  const AxisView v = axis_view(X.shape(), axis);
  Shape out_shape;
  for (std::size_t i = 0; i < X.rank(); ++i)
    if (i != axis) out_shape.push_back(X.dim(i));
  if (out_shape.empty()) out_shape.push_back(1);
  Tensor out(out_shape, 0.0);
  const double inv = 1.0 / static_cast<double>(v.len);
  for (std::size_t o = 0; o < v.outer; ++o)
    for (std::size_t in = 0; in < v.inner; ++in) {
      double s = 0.0;
      for (std::size_t j = 0; j < v.len; ++j) s += X[(o * v.len + j) * v.inner + in];
      out[o * v.inner + in] = s * inv;
    }
  return t.record("mean_pool", std::move(out), {x}, [xi = x.id, v, inv](Tape& tp, const Tensor& g) {
    if (Tensor* gx = tp.grad_sink(xi))
      for (std::size_t o = 0; o < v.outer; ++o)
        for (std::size_t j = 0; j < v.len; ++j)
          for (std::size_t in = 0; in < v.inner; ++in) (*gx)[(o * v.len + j) * v.inner + in] += g[o * v.inner + in] * inv;
  });
}

namespace {

// Shared backward of (x - mean) * invstd over groups of size m:
// dx = invstd/m * (m*dxhat - sum(dxhat) - xhat*sum(dxhat*xhat)).
inline double norm_backward(double dxhat, double xhat, double sum_dxhat, double sum_dxhat_xhat, double invstd,
                            double m) {
  return invstd / m * (m * dxhat - sum_dxhat - xhat * sum_dxhat_xhat);
}

}  // namespace

Var layer_norm(Var x, Var gamma, Var beta, double eps) {
  Tape& t = tape_of(x, gamma);
  if (eps <= 0.0) throw ParameterError("layer_norm: eps must be positive");
  const Tensor& X = x.value();
  const std::size_t d = X.shape().back();
  const std::size_t rows = X.numel() / d;
  if (gamma.numel() != d || beta.numel() != d)
    throw ShapeError("layer_norm: gamma/beta must have " + std::to_string(d) + " entries");
  const Tensor& G = gamma.value();
  const Tensor& B = beta.value();
  Tensor out(X.shape());
  Tensor xhat(X.shape());
  std::vector<double> invstd(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = X.ptr() + r * d;
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += xr[j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (xr[j] - mean) * (xr[j] - mean);
    var /= static_cast<double>(d);
    invstd[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) {
      xhat[r * d + j] = (xr[j] - mean) * invstd[r];
      out[r * d + j] = G[j] * xhat[r * d + j] + B[j];
    }
  }
  return t.record("layer_norm", std::move(out), {x, gamma, beta},
                  [xi = x.id, gi = gamma.id, bi = beta.id, d, rows, xhat = std::move(xhat),
                   invstd = std::move(invstd)](Tape& tp, const Tensor& g) {
                    const Tensor& G = tp.value(gi);
                    if (Tensor* gg = tp.grad_sink(gi))
                      for (std::size_t i = 0; i < g.numel(); ++i) (*gg)[i % d] += g[i] * xhat[i];
                    if (Tensor* gb = tp.grad_sink(bi))
                      for (std::size_t i = 0; i < g.numel(); ++i) (*gb)[i % d] += g[i];
                    if (Tensor* gx = tp.grad_sink(xi)) {
                      const double m = static_cast<double>(d);
                      for (std::size_t r = 0; r < rows; ++r) {
                        double s1 = 0.0, s2 = 0.0;
                        for (std::size_t j = 0; j < d; ++j) {
                          const double dxh = g[r * d + j] * G[j];
                          s1 += dxh;
                          s2 += dxh * xhat[r * d + j];
                        }
                        for (std::size_t j = 0; j < d; ++j) {
                          const double dxh = g[r * d + j] * G[j];
                          (*gx)[r * d + j] += norm_backward(dxh, xhat[r * d + j], s1, s2, invstd[r], m);
                        }
                      }
                    }
                  });
}

Var batch_norm(Var x, Var gamma, Var beta, BatchNormState& state, Mode mode) {
  Tape& t = tape_of(x, gamma);
  const Tensor& X = x.value();
  if (X.rank() < 2) throw ShapeError("batch_norm: expected [N x F] or [N x F x T], got " + shape_str(X.shape()));
  const AxisView v = axis_view(X.shape(), 1);
  const std::size_t f = v.len;
  if (gamma.numel() != f || beta.numel() != f || state.running_mean.numel() != f || state.running_var.numel() != f)
    throw ShapeError("batch_norm: parameter size does not match " + std::to_string(f) + " channels");
  const Tensor& G = gamma.value();
  const Tensor& B = beta.value();
  const std::size_t count = v.outer * v.inner;
  auto at = [&](std::size_t o, std::size_t c, std::size_t in) { return (o * f + c) * v.inner + in; };

  Tensor out(X.shape());
  if (mode == Mode::eval) {
    std::vector<double> invstd(f);
    for (std::size_t c = 0; c < f; ++c) invstd[c] = 1.0 / std::sqrt(state.running_var[c] + state.eps);
    for (std::size_t o = 0; o < v.outer; ++o)
      for (std::size_t c = 0; c < f; ++c)
        for (std::size_t in = 0; in < v.inner; ++in) {
          const std::size_t p = at(o, c, in);
          out[p] = G[c] * (X[p] - state.running_mean[c]) * invstd[c] + B[c];
        }
    std::vector<double> mean(state.running_mean.vec());
    return t.record("batch_norm", std::move(out), {x, gamma, beta},
                    [xi = x.id, gi = gamma.id, bi = beta.id, v, invstd, mean](Tape& tp, const Tensor& g) {
                      const std::size_t f = v.len;
                      const Tensor& G = tp.value(gi);
                      const Tensor& X = tp.value(xi);
                      Tensor* gx = tp.grad_sink(xi);
                      Tensor* gg = tp.grad_sink(gi);
                      Tensor* gb = tp.grad_sink(bi);
                      for (std::size_t o = 0; o < v.outer; ++o)
                        for (std::size_t c = 0; c < f; ++c)
                          for (std::size_t in = 0; in < v.inner; ++in) {
                            const std::size_t p = (o * f + c) * v.inner + in;
                            if (gx) (*gx)[p] += g[p] * G[c] * invstd[c];
                            if (gg) (*gg)[c] += g[p] * (X[p] - mean[c]) * invstd[c];
                            if (gb) (*gb)[c] += g[p];
                          }
                    });
  }

  if (count < 2) throw NumericError("batch_norm: train mode needs at least 2 values per channel");
  std::vector<double> mean(f, 0.0), var(f, 0.0), invstd(f);
  for (std::size_t o = 0; o < v.outer; ++o)
    for (std::size_t c = 0; c < f; ++c)
      for (std::size_t in = 0; in < v.inner; ++in) mean[c] += X[at(o, c, in)];
  for (std::size_t c = 0; c < f; ++c) mean[c] /= static_cast<double>(count);
  for (std::size_t o = 0; o < v.outer; ++o)
    for (std::size_t c = 0; c < f; ++c)
      for (std::size_t in = 0; in < v.inner; ++in) {
        const double dlt = X[at(o, c, in)] - mean[c];
        var[c] += dlt * dlt;
      }
  for (std::size_t c = 0; c < f; ++c) {
    var[c] /= static_cast<double>(count);
    invstd[c] = 1.0 / std::sqrt(var[c] + state.eps);
    const double unbiased = var[c] * static_cast<double>(count) / static_cast<double>(count - 1);
    state.running_mean[c] = (1.0 - state.momentum) * state.running_mean[c] + state.momentum * mean[c];
    state.running_var[c] = (1.0 - state.momentum) * state.running_var[c] + state.momentum * unbiased;
  }
  Tensor xhat(X.shape());
  for (std::size_t o = 0; o < v.outer; ++o)
    for (std::size_t c = 0; c < f; ++c)
      for (std::size_t in = 0; in < v.inner; ++in) {
        const std::size_t p = at(o, c, in);
        xhat[p] = (X[p] - mean[c]) * invstd[c];
        out[p] = G[c] * xhat[p] + B[c];
      }
  return t.record("batch_norm", std::move(out), {x, gamma, beta},
                  [xi = x.id, gi = gamma.id, bi = beta.id, v, count, xhat = std::move(xhat),
                   invstd = std::move(invstd)](Tape& tp, const Tensor& g) {
                    const std::size_t f = v.len;
                    const Tensor& G = tp.value(gi);
                    std::vector<double> s1(f, 0.0), s2(f, 0.0);
                    for (std::size_t o = 0; o < v.outer; ++o)
                      for (std::size_t c = 0; c < f; ++c)
                        for (std::size_t in = 0; in < v.inner; ++in) {
                          const std::size_t p = (o * f + c) * v.inner + in;
                          s1[c] += g[p];
                          s2[c] += g[p] * xhat[p];
                        }
                    if (Tensor* gg = tp.grad_sink(gi))
                      for (std::size_t c = 0; c < f; ++c) (*gg)[c] += s2[c];
                    if (Tensor* gb = tp.grad_sink(bi))
                      for (std::size_t c = 0; c < f; ++c) (*gb)[c] += s1[c];
                    if (Tensor* gx = tp.grad_sink(xi)) {
                      const double m = static_cast<double>(count);
                      for (std::size_t o = 0; o < v.outer; ++o)
                        for (std::size_t c = 0; c < f; ++c)
                          for (std::size_t in = 0; in < v.inner; ++in) {
                            const std::size_t p = (o * f + c) * v.inner + in;
                            (*gx)[p] += norm_backward(g[p] * G[c], xhat[p], s1[c] * G[c], s2[c] * G[c], invstd[c], m);
                          }
                    }
                  });
}

// ---------------------------------------------------------------------------

Var prelu(Var x, Var slope, std::size_t channel_axis) {
  Tape& t = tape_of(x, slope);
  const Tensor& X = x.value();
  const Tensor& A = slope.value();
  const AxisView v = axis_view(X.shape(), channel_axis);
  const bool shared = A.numel() == 1;
  if (!shared && A.numel() != v.len)
    throw ShapeError("prelu: slope " + shape_str(A.shape()) + " does not match channel axis of " + shape_str(X.shape()));
  auto chan = [v, shared](std::size_t p) { return shared ? 0 : (p / v.inner) % v.len; };
  Tensor out(X.shape());
  for (std::size_t p = 0; p < X.numel(); ++p) out[p] = X[p] > 0.0 ? X[p] : A[chan(p)] * X[p];
  return t.record("prelu", std::move(out), {x, slope}, [xi = x.id, ai = slope.id, chan](Tape& tp, const Tensor& g) {
    const Tensor& X = tp.value(xi);
    const Tensor& A = tp.value(ai);
    Tensor* gx = tp.grad_sink(xi);
    Tensor* ga = tp.grad_sink(ai);
    for (std::size_t p = 0; p < X.numel(); ++p) {
      const bool pos = X[p] > 0.0;
      if (gx) (*gx)[p] += pos ? g[p] : g[p] * A[chan(p)];
      if (ga && !pos) (*ga)[chan(p)] += g[p] * X[p];
    }
  });
}

Var elu(Var x, double alpha) {
  Tape& t = tape_of(x);
  const Tensor& X = x.value();
  Tensor out(X.shape());
  for (std::size_t p = 0; p < X.numel(); ++p) out[p] = X[p] > 0.0 ? X[p] : alpha * std::expm1(X[p]);
  return t.record("elu", std::move(out), {x}, [xi = x.id, alpha](Tape& tp, const Tensor& g) {
    if (Tensor* gx = tp.grad_sink(xi)) {
      const Tensor& X = tp.value(xi);
      for (std::size_t p = 0; p < X.numel(); ++p) (*gx)[p] += X[p] > 0.0 ? g[p] : g[p] * alpha * std::exp(X[p]);
    }
  });
}

Var leaky_relu(Var x, double slope) {
  Tape& t = tape_of(x);
  const Tensor& X = x.value();
  Tensor out(X.shape());
  for (std::size_t p = 0; p < X.numel(); ++p) out[p] = X[p] > 0.0 ? X[p] : slope * X[p];
  return t.record("leaky_relu", std::move(out), {x}, [xi = x.id, slope](Tape& tp, const Tensor& g) {
    if (Tensor* gx = tp.grad_sink(xi)) {
      const Tensor& X = tp.value(xi);
      for (std::size_t p = 0; p < X.numel(); ++p) (*gx)[p] += X[p] > 0.0 ? g[p] : g[p] * slope;
    }
  });
}

// ---------------------------------------------------------------------------

Var conv_temporal(Var x, Var kernel) {
  Tape& t = tape_of(x, kernel);
  const Tensor& X = x.value();
  const Tensor& W = kernel.value();
  require_rank("conv_temporal input", X, 3);
  require_rank("conv_temporal kernel", W, 3);
  if (W.dim(1) != X.dim(1))
    throw ShapeError("conv_temporal: kernel " + shape_str(W.shape()) + " expects " + std::to_string(W.dim(1)) +
                     " input maps, input is " + shape_str(X.shape()));
  const std::size_t k = W.dim(2);
  const std::size_t len = X.dim(2);
  if (k > len + 2 * kernels::same_left_pad(k))
    throw ShapeError("conv_temporal: kernel length " + std::to_string(k) + " exceeds padded input");
  kernels::Conv1dShape s{X.dim(0), X.dim(1), W.dim(0), len, k, kernels::same_left_pad(k)};
  Tensor out({s.batch, s.out_ch, len});
  kernels::conv1d_forward(s, X.data(), W.data(), out.data());
  return t.record("conv_temporal", std::move(out), {x, kernel}, [xi = x.id, wi = kernel.id, s](Tape& tp, const Tensor& g) {
    if (Tensor* gx = tp.grad_sink(xi)) {
      std::vector<double> tmp(gx->numel());
      kernels::conv1d_backward_input(s, g.data(), tp.value(wi).data(), tmp);
      accumulate(gx, tmp);
    }
    if (Tensor* gw = tp.grad_sink(wi)) {
      std::vector<double> tmp(gw->numel());
      kernels::conv1d_backward_kernel(s, tp.value(xi).data(), g.data(), tmp);
      accumulate(gw, tmp);
    }
  });
}

Var depthwise_conv_spatial(Var x, Var kernel, std::size_t nodes_per_graph) {
  Tape& t = tape_of(x, kernel);
  const Tensor& X = x.value();
  const Tensor& K = kernel.value();
  require_rank("depthwise_conv_spatial input", X, 3);
  require_rank("depthwise_conv_spatial kernel", K, 2);
  const std::size_t nodes = X.dim(0), f = X.dim(1), len = X.dim(2);
  if (K.dim(0) != f)
    throw ShapeError("depthwise_conv_spatial: " + std::to_string(K.dim(0)) + " kernels for " + std::to_string(f) +
                     " feature maps");
  if (nodes_per_graph == 0 || nodes % nodes_per_graph != 0)
    throw ShapeError("depthwise_conv_spatial: node count " + std::to_string(nodes) + " not a multiple of " +
                     std::to_string(nodes_per_graph));
  const std::size_t ks = K.dim(1);
  const auto pad = static_cast<long long>(kernels::same_left_pad(ks));
  const auto c = static_cast<long long>(nodes_per_graph);
  const std::size_t graphs = nodes / nodes_per_graph;
  Tensor out(X.shape(), 0.0);
  auto idx = [f, len](std::size_t node, std::size_t m, std::size_t tt) { return (node * f + m) * len + tt; };
  for (std::size_t b = 0; b < graphs; ++b)
    for (long long ch = 0; ch < c; ++ch)
      for (std::size_t m = 0; m < f; ++m)
        for (std::size_t j = 0; j < ks; ++j) {
          const long long src = ch + static_cast<long long>(j) - pad;
          if (src < 0 || src >= c) continue;
          const double w = K.at(m, j);
          const std::size_t on = b * nodes_per_graph + static_cast<std::size_t>(ch);
          const std::size_t in = b * nodes_per_graph + static_cast<std::size_t>(src);
          for (std::size_t tt = 0; tt < len; ++tt) out[idx(on, m, tt)] += w * X[idx(in, m, tt)];
        }
  return t.record("depthwise_conv_spatial", std::move(out), {x, kernel},
                  [xi = x.id, ki = kernel.id, graphs, nodes_per_graph, f, len, ks, pad, c, idx](Tape& tp, const Tensor& g) {
                    const Tensor& X = tp.value(xi);
                    const Tensor& K = tp.value(ki);
                    Tensor* gx = tp.grad_sink(xi);
                    Tensor* gk = tp.grad_sink(ki);
                    for (std::size_t b = 0; b < graphs; ++b)
                      for (long long ch = 0; ch < c; ++ch)
                        for (std::size_t m = 0; m < f; ++m)
                          for (std::size_t j = 0; j < ks; ++j) {
                            const long long src = ch + static_cast<long long>(j) - pad;
                            if (src < 0 || src >= c) continue;
                            const std::size_t on = b * nodes_per_graph + static_cast<std::size_t>(ch);
                            const std::size_t in = b * nodes_per_graph + static_cast<std::size_t>(src);
                            double acc = 0.0;
                            for (std::size_t tt = 0; tt < len; ++tt) {
                              const double gv = g[idx(on, m, tt)];
                              if (gx) (*gx)[idx(in, m, tt)] += gv * K.at(m, j);
                              acc += gv * X[idx(in, m, tt)];
                            }
                            if (gk) (*gk)[m * ks + j] += acc;
                          }
                  });
}

// ---------------------------------------------------------------------------

Var dropout(Var x, double p, DropoutGranularity granularity, Mode mode, CounterRng rng) {
  if (!(p >= 0.0 && p < 1.0)) throw ParameterError("dropout: p must lie in [0, 1), got " + std::to_string(p));
  if (mode == Mode::eval || p == 0.0) return x;
  Tape& t = tape_of(x);
  const Tensor& X = x.value();
  const double keep_scale = 1.0 / (1.0 - p);
  if (granularity == DropoutGranularity::element) {
    Tensor mask(X.shape());
    for (std::size_t i = 0; i < mask.numel(); ++i) mask[i] = rng.bernoulli(p) ? 0.0 : keep_scale;
    return mul(x, t.constant(std::move(mask)));
  }
  Shape lead(X.shape().begin(), X.shape().end() - 1);
  if (lead.empty()) lead.push_back(1);
  Tensor mask(lead);
  for (std::size_t i = 0; i < mask.numel(); ++i) mask[i] = rng.bernoulli(p) ? 0.0 : keep_scale;
  return scale_by(x, t.constant(std::move(mask)));
}

// ---------------------------------------------------------------------------

Var gather_rows(Var x, const std::vector<std::size_t>& idx) {
  Tape& t = tape_of(x);
  const Tensor& X = x.value();
  require_rank("gather_rows", X, 2);
  const std::size_t rows = X.dim(0), d = X.dim(1);
  if (idx.empty()) throw ShapeError("gather_rows: empty index");
  for (auto r : idx)
    if (r >= rows) throw IndexError("gather_rows: row " + std::to_string(r) + " out of range for " + std::to_string(rows) + " rows");
  Tensor out({idx.size(), d});
  for (std::size_t e = 0; e < idx.size(); ++e)
    std::copy_n(X.ptr() + idx[e] * d, d, out.ptr() + e * d);
  return t.record("gather_rows", std::move(out), {x}, [xi = x.id, idx, d](Tape& tp, const Tensor& g) {
    if (Tensor* gx = tp.grad_sink(xi))
      for (std::size_t e = 0; e < idx.size(); ++e)
        for (std::size_t j = 0; j < d; ++j) (*gx)[idx[e] * d + j] += g[e * d + j];
  });
}

Var scatter_add_rows(Var x, const std::vector<std::size_t>& idx, std::size_t rows) {
  Tape& t = tape_of(x);
  const Tensor& X = x.value();
  require_rank("scatter_add_rows", X, 2);
  if (idx.size() != X.dim(0)) throw ShapeError("scatter_add_rows: index length does not match row count");
  const std::size_t d = X.dim(1);
  for (auto r : idx)
    if (r >= rows) throw IndexError("scatter_add_rows: row " + std::to_string(r) + " out of range for " + std::to_string(rows) + " rows");
  Tensor out({rows, d}, 0.0);
  for (std::size_t e = 0; e < idx.size(); ++e)
    for (std::size_t j = 0; j < d; ++j) out[idx[e] * d + j] += X[e * d + j];
  return t.record("scatter_add_rows", std::move(out), {x}, [xi = x.id, idx, d](Tape& tp, const Tensor& g) {
    if (Tensor* gx = tp.grad_sink(xi))
      for (std::size_t e = 0; e < idx.size(); ++e)
        for (std::size_t j = 0; j < d; ++j) (*gx)[e * d + j] += g[idx[e] * d + j];
  });
}

Var segment_softmax(Var x, const std::vector<std::size_t>& segment, std::size_t segments) {
  Tape& t = tape_of(x);
  const Tensor& X = x.value();
  require_rank("segment_softmax", X, 2);
  const std::size_t h = X.dim(0), e = X.dim(1);
  if (segment.size() != e) throw ShapeError("segment_softmax: segment ids do not match column count");
  for (auto s : segment)
    if (s >= segments) throw IndexError("segment_softmax: segment id " + std::to_string(s) + " out of range");
  Tensor out(X.shape());
  std::vector<double> mx(segments), den(segments);
  for (std::size_t r = 0; r < h; ++r) {
    const double* xr = X.ptr() + r * e;
    std::fill(mx.begin(), mx.end(), -std::numeric_limits<double>::infinity());
    std::fill(den.begin(), den.end(), 0.0);
    for (std::size_t j = 0; j < e; ++j) {
      if (std::isnan(xr[j])) throw NumericError("segment_softmax: NaN in input");
      mx[segment[j]] = std::max(mx[segment[j]], xr[j]);
    }
    for (std::size_t j = 0; j < e; ++j) {
      const double v = std::exp(xr[j] - mx[segment[j]]);
      out[r * e + j] = v;
      den[segment[j]] += v;
    }
    for (std::size_t j = 0; j < e; ++j) out[r * e + j] /= den[segment[j]];
  }
  const std::size_t self = t.size();
  return t.record("segment_softmax", std::move(out), {x}, [xi = x.id, self, segment, segments, h, e](Tape& tp, const Tensor& g) {
    Tensor* gx = tp.grad_sink(xi);
    if (gx == nullptr) return;
    const Tensor& Y = tp.value(self);
    std::vector<double> dot(segments);
    for (std::size_t r = 0; r < h; ++r) {
      std::fill(dot.begin(), dot.end(), 0.0);
      for (std::size_t j = 0; j < e; ++j) dot[segment[j]] += g[r * e + j] * Y[r * e + j];
      for (std::size_t j = 0; j < e; ++j) (*gx)[r * e + j] += Y[r * e + j] * (g[r * e + j] - dot[segment[j]]);
    }
  });
}

Var segment_mean(Var x, const std::vector<std::size_t>& group, std::size_t groups) {
  Tape& t = tape_of(x);
  const Tensor& X = x.value();
  require_rank("segment_mean", X, 2);
  const std::size_t n = X.dim(0), d = X.dim(1);
  if (group.size() != n) throw ShapeError("segment_mean: membership does not cover every row");
  std::vector<double> count(groups, 0.0);
  for (auto gi : group) {
    if (gi >= groups) throw IndexError("segment_mean: group id " + std::to_string(gi) + " out of range");
    count[gi] += 1.0;
  }
  for (std::size_t q = 0; q < groups; ++q)
    if (count[q] == 0.0) throw ContractError("segment_mean: group " + std::to_string(q) + " is empty");
  Tensor out({groups, d}, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < d; ++j) out[group[r] * d + j] += X[r * d + j];
  for (std::size_t q = 0; q < groups; ++q)
    for (std::size_t j = 0; j < d; ++j) out[q * d + j] /= count[q];
  return t.record("segment_mean", std::move(out), {x}, [xi = x.id, group, count, d](Tape& tp, const Tensor& g) {
    if (Tensor* gx = tp.grad_sink(xi))
      for (std::size_t r = 0; r < group.size(); ++r)
        for (std::size_t j = 0; j < d; ++j) (*gx)[r * d + j] += g[group[r] * d + j] / count[group[r]];
  });
}

}  // namespace tgat::numerics
