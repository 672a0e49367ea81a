#pragma once

#include <cstddef>
#include <span>

// Hot loops behind the tensor ops. The parallel variants are what the ops
// call; `reference::` keeps plain serial loops for tests and the benchmark.
// Parallel variants split work only over independent outputs, so results are
// bit-identical for any thread count.

namespace tgat::numerics::kernels {

/// Batched 1-D cross-correlation with zero padding.
/// x: [batch x in_ch x length], w: [out_ch x in_ch x kernel],
/// y: [batch x out_ch x length];
/// y[n][o][t] = sum_i sum_d w[o][i][d] * x[n][i][t + d - left_pad].
struct Conv1dShape {
  std::size_t batch = 1;
  std::size_t in_ch = 1;
  std::size_t out_ch = 1;
  std::size_t length = 1;
  std::size_t kernel = 1;
  std::size_t left_pad = 0;
};

/// "Same" padding: total kernel-1 zeros, the smaller half on the left.
constexpr std::size_t same_left_pad(std::size_t kernel) noexcept { return (kernel - 1) / 2; }

void conv1d_forward(const Conv1dShape& s, std::span<const double> x, std::span<const double> w,
                    std::span<double> y);
void conv1d_backward_input(const Conv1dShape& s, std::span<const double> dy, std::span<const double> w,
                           std::span<double> dx);
void conv1d_backward_kernel(const Conv1dShape& s, std::span<const double> x, std::span<const double> dy,
                            std::span<double> dw);

/// c[m x n] = a[m x k] * b[k x n]
void matmul(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c);
/// c[m x n] = a[k x m]^T * b[k x n]
void matmul_tn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c);
/// c[m x n] = a[m x k] * b[n x k]^T
void matmul_nt(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c);

/// Threads the parallel kernels may use (0 = OpenMP default).
void set_max_threads(int n);
int max_threads();

namespace reference {

void conv1d_forward(const Conv1dShape& s, std::span<const double> x, std::span<const double> w,
                    std::span<double> y);
void conv1d_backward_input(const Conv1dShape& s, std::span<const double> dy, std::span<const double> w,
                           std::span<double> dx);
void conv1d_backward_kernel(const Conv1dShape& s, std::span<const double> x, std::span<const double> dy,
                            std::span<double> dw);
void matmul(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c);

}  // namespace reference

}  // namespace tgat::numerics::kernels
