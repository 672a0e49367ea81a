#include "tgat/numerics/kernels.hpp"

namespace tgat::numerics::kernels::reference {

void conv1d_forward(const Conv1dShape& s, std::span<const double> x, std::span<const double> w,
                    std::span<double> y) {
  const auto pad = static_cast<long long>(s.left_pad);
  const auto len = static_cast<long long>(s.length);
  for (std::size_t n = 0; n < s.batch; ++n)
    for (std::size_t o = 0; o < s.out_ch; ++o)
      for (long long t = 0; t < len; ++t) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s.in_ch; ++i)
          for (std::size_t d = 0; d < s.kernel; ++d) {
            const long long src = t + static_cast<long long>(d) - pad;
            if (src < 0 || src >= len) continue;
            acc += w[(o * s.in_ch + i) * s.kernel + d] * x[(n * s.in_ch + i) * s.length + src];
          }
        y[(n * s.out_ch + o) * s.length + t] = acc;
      }
}

void conv1d_backward_input(const Conv1dShape& s, std::span<const double> dy, std::span<const double> w,
                           std::span<double> dx) {
  const auto pad = static_cast<long long>(s.left_pad);
  const auto len = static_cast<long long>(s.length);
  for (auto& v : dx) v = 0.0;
  for (std::size_t n = 0; n < s.batch; ++n)
    for (std::size_t o = 0; o < s.out_ch; ++o)
      for (long long t = 0; t < len; ++t) {
        const double g = dy[(n * s.out_ch + o) * s.length + t];
        for (std::size_t i = 0; i < s.in_ch; ++i)
          for (std::size_t d = 0; d < s.kernel; ++d) {
            const long long src = t + static_cast<long long>(d) - pad;
            if (src < 0 || src >= len) continue;
            dx[(n * s.in_ch + i) * s.length + src] += g * w[(o * s.in_ch + i) * s.kernel + d];
          }
      }
}

void conv1d_backward_kernel(const Conv1dShape& s, std::span<const double> x, std::span<const double> dy,
                            std::span<double> dw) {
  const auto pad = static_cast<long long>(s.left_pad);
  const auto len = static_cast<long long>(s.length);
  for (auto& v : dw) v = 0.0;
  for (std::size_t n = 0; n < s.batch; ++n)
    for (std::size_t o = 0; o < s.out_ch; ++o)
      for (long long t = 0; t < len; ++t) {
        const double g = dy[(n * s.out_ch + o) * s.length + t];
        for (std::size_t i = 0; i < s.in_ch; ++i)
          for (std::size_t d = 0; d < s.kernel; ++d) {
            const long long src = t + static_cast<long long>(d) - pad;
            if (src < 0 || src >= len) continue;
            dw[(o * s.in_ch + i) * s.kernel + d] += g * x[(n * s.in_ch + i) * s.length + src];
          }
      }
}

void matmul(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t l = 0; l < k; ++l) acc += a[i * k + l] * b[l * n + j];
      c[i * n + j] = acc;
    }
}

}  // namespace tgat::numerics::kernels::reference
