#include "tgat/numerics/kernels.hpp"

#include <algorithm>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tgat::numerics::kernels {

namespace {

constexpr std::size_t kTimeBlock = 16;
constexpr std::size_t kOutBlock = 4;
constexpr std::size_t kTapBlock = 16;

constexpr std::size_t round_up(std::size_t v, std::size_t b) { return (v + b - 1) / b * b; }

// Copies x into rows of width `row` with `left` leading zeros; the tail stays
// zero so blocked loops never branch on bounds.
std::vector<double> pad_rows(std::span<const double> x, std::size_t rows, std::size_t length,
                             std::size_t row, std::size_t left) {
  std::vector<double> xp(rows * row, 0.0);
  const auto n = static_cast<long long>(rows);
#pragma omp parallel for schedule(static)
  for (long long r = 0; r < n; ++r) {
    std::memcpy(&xp[r * row + left], &x[r * length], length * sizeof(double));
  }
  return xp;
}

template <std::size_t NB>
inline void conv_block(const double* xp, std::size_t lp, const double* w, std::size_t in_ch, std::size_t k,
                       std::size_t o0, std::size_t tb, std::size_t length, double* y_node) {
  double acc[NB][kTimeBlock] = {};
  for (std::size_t i = 0; i < in_ch; ++i) {
    const double* xr = xp + i * lp + tb;
    for (std::size_t d = 0; d < k; ++d) {
      const double* xx = xr + d;
      for (std::size_t ob = 0; ob < NB; ++ob) {
        const double wv = w[((o0 + ob) * in_ch + i) * k + d];
#pragma omp simd
        for (std::size_t t = 0; t < kTimeBlock; ++t) acc[ob][t] += wv * xx[t];
      }
    }
  }
  const std::size_t tn = std::min(kTimeBlock, length - tb);
  for (std::size_t ob = 0; ob < NB; ++ob) {
    double* yr = y_node + (o0 + ob) * length + tb;
    for (std::size_t t = 0; t < tn; ++t) yr[t] = acc[ob][t];
  }
}

template <std::size_t NB>
inline void kernel_grad_block(const double* xp, std::size_t lp, const double* dy, std::size_t batch,
                              std::size_t in_ch, std::size_t out_ch, std::size_t length, std::size_t k,
                              std::size_t o0, std::size_t i, std::size_t db, double* dw) {
  double acc[NB][kTapBlock] = {};
  for (std::size_t n = 0; n < batch; ++n) {
    const double* xr = xp + (n * in_ch + i) * lp + db;
    const double* g = dy + (n * out_ch + o0) * length;
    for (std::size_t t = 0; t < length; ++t) {
      const double* xx = xr + t;
      for (std::size_t ob = 0; ob < NB; ++ob) {
        const double gv = g[ob * length + t];
#pragma omp simd
        for (std::size_t dd = 0; dd < kTapBlock; ++dd) acc[ob][dd] += gv * xx[dd];
      }
    }
  }
  const std::size_t dn = std::min(kTapBlock, k - db);
  for (std::size_t ob = 0; ob < NB; ++ob) {
    double* wr = dw + ((o0 + ob) * in_ch + i) * k + db;
    for (std::size_t dd = 0; dd < dn; ++dd) wr[dd] = acc[ob][dd];
  }
}

}  // namespace

void set_max_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void conv1d_forward(const Conv1dShape& s, std::span<const double> x, std::span<const double> w,
                    std::span<double> y) {
  const std::size_t tr = round_up(s.length, kTimeBlock);
  const std::size_t lp = tr + s.kernel - 1;
  const std::vector<double> xp = pad_rows(x, s.batch * s.in_ch, s.length, lp, s.left_pad);
  const auto nodes = static_cast<long long>(s.batch);
#pragma omp parallel for schedule(static)
  for (long long n = 0; n < nodes; ++n) {
    const double* xn = xp.data() + n * s.in_ch * lp;
    double* yn = y.data() + n * s.out_ch * s.length;
    for (std::size_t o0 = 0; o0 < s.out_ch; o0 += kOutBlock) {
      const std::size_t nb = std::min(kOutBlock, s.out_ch - o0);
      for (std::size_t tb = 0; tb < tr; tb += kTimeBlock) {
        if (nb == kOutBlock) {
          conv_block<kOutBlock>(xn, lp, w.data(), s.in_ch, s.kernel, o0, tb, s.length, yn);
        } else {
          for (std::size_t ob = 0; ob < nb; ++ob)
            conv_block<1>(xn, lp, w.data(), s.in_ch, s.kernel, o0 + ob, tb, s.length, yn);
        }
      }
    }
  }
}

void conv1d_backward_input(const Conv1dShape& s, std::span<const double> dy, std::span<const double> w,
                           std::span<double> dx) {
  // Adjoint of a correlation is a correlation with the flipped, transposed kernel.
  std::vector<double> wf(w.size());
  for (std::size_t o = 0; o < s.out_ch; ++o)
    for (std::size_t i = 0; i < s.in_ch; ++i)
      for (std::size_t d = 0; d < s.kernel; ++d)
        wf[(i * s.out_ch + o) * s.kernel + (s.kernel - 1 - d)] = w[(o * s.in_ch + i) * s.kernel + d];
  Conv1dShape t = s;
  t.in_ch = s.out_ch;
  t.out_ch = s.in_ch;
  t.left_pad = s.kernel - 1 - s.left_pad;
  conv1d_forward(t, dy, wf, dx);
}

void conv1d_backward_kernel(const Conv1dShape& s, std::span<const double> x, std::span<const double> dy,
                            std::span<double> dw) {
  const std::size_t kr = round_up(s.kernel, kTapBlock);
  const std::size_t lp = s.length + kr - 1;
  const std::vector<double> xp = pad_rows(x, s.batch * s.in_ch, s.length, lp, s.left_pad);
  const std::size_t oblocks = (s.out_ch + kOutBlock - 1) / kOutBlock;
  const auto jobs = static_cast<long long>(oblocks * s.in_ch);
#pragma omp parallel for schedule(static)
  for (long long job = 0; job < jobs; ++job) {
    const std::size_t o0 = static_cast<std::size_t>(job) / s.in_ch * kOutBlock;
    const std::size_t i = static_cast<std::size_t>(job) % s.in_ch;
    const std::size_t nb = std::min(kOutBlock, s.out_ch - o0);
    for (std::size_t db = 0; db < kr; db += kTapBlock) {
      if (nb == kOutBlock) {
        kernel_grad_block<kOutBlock>(xp.data(), lp, dy.data(), s.batch, s.in_ch, s.out_ch, s.length, s.kernel,
                                     o0, i, db, dw.data());
      } else {
        for (std::size_t ob = 0; ob < nb; ++ob)
          kernel_grad_block<1>(xp.data(), lp, dy.data(), s.batch, s.in_ch, s.out_ch, s.length, s.kernel,
                               o0 + ob, i, db, dw.data());
      }
    }
  }
}

void matmul(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
  const auto rows = static_cast<long long>(m);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < rows; ++i) {
    double* ci = c + i * n;
    std::fill(ci, ci + n, 0.0);
    for (std::size_t l = 0; l < k; ++l) {
      const double av = a[i * k + l];
      const double* bl = b + l * n;
#pragma omp simd
      for (std::size_t j = 0; j < n; ++j) ci[j] += av * bl[j];
    }
  }
}

void matmul_tn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
  const auto rows = static_cast<long long>(m);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < rows; ++i) {
    double* ci = c + i * n;
    std::fill(ci, ci + n, 0.0);
    for (std::size_t l = 0; l < k; ++l) {
      const double av = a[l * m + i];
      const double* bl = b + l * n;
#pragma omp simd
      for (std::size_t j = 0; j < n; ++j) ci[j] += av * bl[j];
    }
  }
}

void matmul_nt(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
  const auto rows = static_cast<long long>(m);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < rows; ++i) {
    const double* ai = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double s = 0.0;
      for (std::size_t l = 0; l < k; ++l) s += ai[l] * bj[l];
      c[i * n + j] = s;
    }
  }
}

}  // namespace tgat::numerics::kernels
