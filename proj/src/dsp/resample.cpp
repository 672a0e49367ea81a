#include "tgat/dsp/resample.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "tgat/error.hpp"

namespace tgat::dsp {

namespace {

constexpr double kKaiserBeta = 5.0;

std::vector<double> design_kernel(std::size_t half_len, double cutoff) {
  const std::size_t len = 2 * half_len + 1;
  std::vector<double> h(len);
  const double norm = std::cyl_bessel_i(0.0, kKaiserBeta);
  for (std::size_t k = 0; k < len; ++k) {
    const double t = static_cast<double>(k) - static_cast<double>(half_len);
    const double arg = std::numbers::pi * cutoff * t;
    const double sinc = t == 0.0 ? 1.0 : std::sin(arg) / arg;
    const double r = t / static_cast<double>(half_len);
    const double w = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / norm;
    h[k] = cutoff * sinc * w;
  }
  return h;
}

// x extended by odd reflection about each end; falls back to the edge value
// once the reflection would leave the signal.
double extended(std::span<const double> x, long long i) {
  const long long n = static_cast<long long>(x.size());
  if (i >= 0 && i < n) return x[static_cast<std::size_t>(i)];
  if (i < 0) {
    const long long m = -i;
    return m < n ? 2.0 * x[0] - x[static_cast<std::size_t>(m)] : x[0];
  }
  const long long m = 2 * (n - 1) - i;
  return m >= 0 ? 2.0 * x[static_cast<std::size_t>(n - 1)] - x[static_cast<std::size_t>(m)] : x[static_cast<std::size_t>(n - 1)];
}

}  // namespace

Ratio rational_ratio(double fs, double target) {
  if (!(fs > 0.0)) throw ParameterError("resample: source rate must be positive");
  if (!(target > 0.0)) throw ParameterError("resample: target rate must be positive");
  const double q = target / fs;
  for (std::size_t down = 1; down <= 10000; ++down) {
    const double up = std::round(q * static_cast<double>(down));
    if (up >= 1.0 && std::abs(up - q * static_cast<double>(down)) < 1e-9 * static_cast<double>(down)) {
      const auto u = static_cast<std::size_t>(up);
      const std::size_t g = std::gcd(u, down);
      return {u / g, down / g};
    }
  }
  throw ParameterError("resample: no rational ratio between " + std::to_string(fs) + " and " +
                       std::to_string(target) + " Hz");
}

std::vector<double> resample_poly(std::span<const double> x, Ratio r) {
  if (r.up == 0 || r.down == 0) throw ParameterError("resample_poly: up and down must be positive");
  if (r.up == r.down) return {x.begin(), x.end()};
  if (x.empty()) return {};
  const std::size_t maxf = std::max(r.up, r.down);
  const std::size_t half_len = 10 * maxf;
  const std::vector<double> h = design_kernel(half_len, 1.0 / static_cast<double>(maxf));

  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(x.size()) * static_cast<double>(r.up) / static_cast<double>(r.down)));
  const auto up = static_cast<long long>(r.up);
  const auto hl = static_cast<long long>(half_len);
  std::vector<double> y(n_out);
  for (std::size_t m = 0; m < n_out; ++m) {
    // y[m] sits at position m*down on the upsampled grid
    const long long pos = static_cast<long long>(m * r.down);
    long long lo = pos - hl;
    const long long first = lo >= 0 ? (lo + up - 1) / up : -((-lo) / up);
    const long long last = (pos + hl) >= 0 ? (pos + hl) / up : -((-(pos + hl) + up - 1) / up);
    double acc = 0.0, wsum = 0.0;
    for (long long j = first; j <= last; ++j) {
      const double w = h[static_cast<std::size_t>(hl + pos - j * up)];
      acc += w * extended(x, j);
      wsum += w;
    }
    // each polyphase branch normalised to unit DC gain
    y[m] = acc / wsum;
  }
  return y;
}

Recording resample(const Recording& r, double target) {
  const Ratio ratio = rational_ratio(r.sample_rate, target);
  Recording out = r;
  out.sample_rate = target;
  if (ratio.up == ratio.down) return out;
  for (auto& ch : out.samples) ch = resample_poly(ch, ratio);
  const std::size_t n = out.length();
  for (auto& ev : out.events) {
    const auto onset = static_cast<std::size_t>(std::llround(static_cast<double>(ev.onset_sample) *
                                                             static_cast<double>(ratio.up) /
                                                             static_cast<double>(ratio.down)));
    ev.onset_sample = std::min(onset, n == 0 ? 0 : n - 1);
  }
  return out;
}

}  // namespace tgat::dsp
