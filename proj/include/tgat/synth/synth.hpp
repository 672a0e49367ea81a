#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "tgat/dsp/recording.hpp"
#include "tgat/numerics/rng.hpp"

namespace tgat::synth {

// Task window relative to each stimulus onset, split into 1-second segments.
inline constexpr double kWindowStart = 9.0;
inline constexpr double kWindowEnd = 15.0;
inline constexpr std::size_t kWindowSegments = 6;

enum class Timing { uniform, localized };

struct SynthConfig {
  std::size_t n_subjects = 1;
  std::size_t trials_per_class = 40;
  std::size_t channels = 8;
  double sample_rate = 256.0;

  // layout: lead-in, then trials of trial_length_s separated by gap_s, then a tail
  double lead_s = 2.0;
  double trial_length_s = 16.0;
  double gap_s = 2.0;

  double noise_exponent = 1.0;  // power spectrum ~ 1/f^gamma, unit variance
  double line_noise_amplitude = 0.5;
  double drift_amplitude = 1.0;
  double drift_hz = 0.05;

  double signal_low_hz = 8.0;
  double signal_high_hz = 13.0;
  double signal_amplitude = 2.0;  // burst RMS over its second, in noise std units
  std::vector<std::size_t> signal_channels;  // empty: the first half of the montage
  Timing timing = Timing::uniform;
  std::vector<std::size_t> localized_segments{1, 4};  // per class

  std::uint64_t seed = 0;

  void validate() const;
  /// Spacing between consecutive onsets, in samples.
  std::size_t trial_stride() const;
  std::size_t recording_length() const;
};

/// "separable" or "temporal"; anything else is a ConfigError.
SynthConfig preset(const std::string& name);

nlohmann::json to_json(const SynthConfig& c);
/// Starts from the preset named by "preset" (default "separable") and
/// overrides the keys present. The seed is not read here.
SynthConfig synth_config_from_json(const nlohmann::json& j);

inline const std::map<std::string, int>& label_map() {
  static const std::map<std::string, int> m{{"S  1", 0}, {"S  2", 1}};
  return m;
}
inline const std::vector<std::string>& accepted_markers() {
  static const std::vector<std::string> m{"S  1", "S  2"};
  return m;
}
inline constexpr const char* kRestMarker = "R  9";

/// Unit-variance noise with a 1/f^gamma power spectrum (DC removed).
std::vector<double> colored_noise(std::size_t n, double gamma, numerics::CounterRng& rng);

/// 1-second Hann-windowed sinusoid whose RMS over the second is `rms`.
std::vector<double> hann_burst(std::size_t n, double freq_hz, double fs, double rms, double phase);

/// Burst frequency for a class: classes split the signal band into equal
/// sub-bands and each burst draws uniformly from its class's sub-band.
double burst_frequency(const SynthConfig& cfg, int label, numerics::CounterRng& rng);

/// Segments (0..5 of the task window) that carry a burst for this class.
std::vector<std::size_t> burst_segments(const SynthConfig& cfg, int label);

dsp::Recording generate_recording(const SynthConfig& cfg, std::size_t subject, numerics::CounterRng rng);

struct DatasetFiles {
  std::vector<std::filesystem::path> headers;
  std::filesystem::path manifest;
};

/// One TGR file pair per subject plus manifest.json in `dir`. Subjects are
/// generated in parallel from per-subject streams of the seed.
DatasetFiles generate_dataset(const SynthConfig& cfg, const std::filesystem::path& dir);

std::string subject_name(std::size_t subject);

}  // namespace tgat::synth
