#include "tgat/dsp/filter.hpp"

#include <cmath>
#include <numbers>

#include "tgat/error.hpp"

namespace tgat::dsp {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

void check_band(double f, double fs, const char* what) {
  if (!(fs > 0.0)) throw ParameterError(std::string(what) + ": sample rate must be positive");
  if (!(f > 0.0) || !(f < fs / 2.0))
    throw ParameterError(std::string(what) + ": frequency " + std::to_string(f) + " Hz outside (0, " +
                         std::to_string(fs / 2.0) + ")");
}

// Steady-state TDF-II state of one section for a unit step.
std::pair<double, double> step_state(const Biquad& s) {
  const double g = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
  return {g - s.b0, s.b2 - s.a2 * g};
}

void run(const BiquadCascade& f, std::vector<double>& x, double x0, bool steady) {
  double scale = x0;
  for (const Biquad& s : f.sections) {
    double z1 = 0.0, z2 = 0.0;
    if (steady) {
      auto [s1, s2] = step_state(s);
      z1 = s1 * scale;
      z2 = s2 * scale;
      scale *= (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    }
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
}

}  // namespace

cplx Biquad::response(double freq_hz, double fs) const {
  const cplx z1 = std::polar(1.0, -2.0 * kPi * freq_hz / fs);
  const cplx z2 = z1 * z1;
  return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
}

bool Biquad::stable() const { return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2; }

cplx BiquadCascade::response(double freq_hz, double fs) const {
  cplx h = 1.0;
  for (const auto& s : sections) h *= s.response(freq_hz, fs);
  return h;
}

double BiquadCascade::gain_db(double freq_hz, double fs) const {
  return 20.0 * std::log10(std::abs(response(freq_hz, fs)));
}

bool BiquadCascade::stable() const {
  for (const auto& s : sections)
    if (!s.stable()) return false;
  return true;
}

BiquadCascade design_notch(double f0, double fs, double q) {
  check_band(f0, fs, "design_notch");
  if (!(q > 0.0)) throw ParameterError("design_notch: Q must be positive");
  const double w0 = 2.0 * kPi * f0 / fs;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  const double c = -2.0 * std::cos(w0);
  Biquad s{1.0 / a0, c / a0, 1.0 / a0, c / a0, (1.0 - alpha) / a0};
  return BiquadCascade{{s}};
}

BiquadCascade design_bandpass(double low, double high, double fs, int order) {
  check_band(low, fs, "design_bandpass");
  check_band(high, fs, "design_bandpass");
  if (!(low < high)) throw ParameterError("design_bandpass: low edge must be below high edge");
  if (order < 2 || order % 2 != 0) throw ParameterError("design_bandpass: order must be a positive even integer");

  // prewarped analog band edges
  const double wl = 2.0 * fs * std::tan(kPi * low / fs);
  const double wh = 2.0 * fs * std::tan(kPi * high / fs);
  const double bw = wh - wl;
  const double w0 = std::sqrt(wl * wh);
  const double f_center = std::atan(w0 / (2.0 * fs)) * fs / kPi;

  BiquadCascade out;
  // Prototype poles in the upper half plane; each maps to two analog
  // band-pass poles, and the conjugate prototype pole yields their conjugates.
  for (int k = 0; k < order / 2; ++k) {
    const cplx p = std::polar(1.0, kPi * (2.0 * k + order + 1) / (2.0 * order));
    const cplx half = p * bw / 2.0;
    const cplx root = std::sqrt(half * half - w0 * w0);
    for (const cplx s : {half + root, half - root}) {
      cplx z = (2.0 * fs + s) / (2.0 * fs - s);
      if (z.imag() < 0.0) z = std::conj(z);
      Biquad b{1.0, 0.0, -1.0, -2.0 * z.real(), std::norm(z)};
      const double g = 1.0 / std::abs(b.response(f_center, fs));
      b.b0 = g;
      b.b2 = -g;
      out.sections.push_back(b);
    }
  }
  return out;
}

std::size_t filtfilt_padding(const BiquadCascade& f) { return 3 * f.sections.size() * 10; }

std::vector<double> sosfilt(const BiquadCascade& f, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  run(f, y, 0.0, false);
  return y;
}

std::vector<double> filtfilt(const BiquadCascade& f, std::span<const double> x) {
  const std::size_t pad = filtfilt_padding(f);
  const std::size_t n = x.size();
  if (n <= pad)
    throw ShapeError("filtfilt: signal of " + std::to_string(n) + " samples is not longer than the " +
                     std::to_string(pad) + "-sample padding");

  std::vector<double> ext(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) {
    ext[i] = 2.0 * x[0] - x[pad - i];
    ext[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];
  }
  std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));

  run(f, ext, ext.front(), true);
  std::reverse(ext.begin(), ext.end());
  run(f, ext, ext.front(), true);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

Recording filtfilt(const BiquadCascade& f, const Recording& r) {
  Recording out = r;
  for (auto& ch : out.samples) ch = filtfilt(f, ch);
  return out;
}

}  // namespace tgat::dsp
