#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace tgat::numerics {

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the i-th draw is a pure function of (key, i).
/// Streams are derived with split(), so a draw depends only on the path of
/// stream tags (seed -> fold -> epoch -> batch -> op call), never on how many
/// draws other streams made.
class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t key = 0) noexcept : key_(mix64(key + 0x9e3779b97f4a7c15ULL)) {}

  constexpr CounterRng split(std::uint64_t stream) const noexcept {
    CounterRng r;
    r.key_ = mix64(key_ ^ mix64(stream * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
    return r;
  }

  constexpr std::uint64_t next_u64() noexcept { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Box-Muller; discards the second variate to stay counter-pure.
  double normal() noexcept {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept { return n == 0 ? 0 : next_u64() % n; }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// Hands out one independent stream per stochastic op call within a pass.
class OpRngStream {
 public:
  explicit OpRngStream(CounterRng base) noexcept : base_(base) {}
  CounterRng next() noexcept { return base_.split(calls_++); }
  std::uint64_t calls() const noexcept { return calls_; }

 private:
  CounterRng base_;
  std::uint64_t calls_ = 0;
};

}  // namespace tgat::numerics
