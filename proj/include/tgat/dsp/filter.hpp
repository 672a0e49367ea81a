#pragma once

#include <complex>
#include <span>
#include <vector>

#include "tgat/dsp/recording.hpp"

namespace tgat::dsp {

/// H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(double freq_hz, double fs) const;
  bool stable() const;
};

struct BiquadCascade {
  std::vector<Biquad> sections;

  std::complex<double> response(double freq_hz, double fs) const;
  double gain_db(double freq_hz, double fs) const;
  bool stable() const;
};

/// Bilinear-transform notch (unit gain at DC and Nyquist, null at f0).
BiquadCascade design_notch(double f0, double fs, double q = 30.0);

/// Butterworth band-pass: `order` is the low-pass prototype order, so the
/// result has `order` sections and total order 2 * order. Must be even.
BiquadCascade design_bandpass(double low, double high, double fs, int order = 4);

/// Reflection padding applied on each side by filtfilt.
std::size_t filtfilt_padding(const BiquadCascade& f);

/// Zero-phase forward-backward filtering with odd reflective padding and
/// steady-state initial conditions. Throws ShapeError if the signal is not
/// longer than the padding.
std::vector<double> filtfilt(const BiquadCascade& f, std::span<const double> x);
Recording filtfilt(const BiquadCascade& f, const Recording& r);

/// Single forward pass, zero initial state.
std::vector<double> sosfilt(const BiquadCascade& f, std::span<const double> x);

}  // namespace tgat::dsp
