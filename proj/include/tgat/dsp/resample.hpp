#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tgat/dsp/recording.hpp"

namespace tgat::dsp {

struct Ratio {
  std::size_t up = 1;
  std::size_t down = 1;
};

/// Smallest up/down with target/fs == up/down (denominator up to 10000).
/// Throws ParameterError if the rates have no such ratio.
Ratio rational_ratio(double fs, double target);

/// Polyphase Kaiser-windowed-sinc resampling, output length round(N * up / down).
/// Edges are extended by odd reflection, so constants and ramps pass unchanged.
std::vector<double> resample_poly(std::span<const double> x, Ratio r);

Recording resample(const Recording& r, double target = 256.0);

}  // namespace tgat::dsp
