#include "tgat/synth/synth.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>

#include "tgat/binary_io.hpp"
#include "tgat/dsp/tgr_io.hpp"
#include "tgat/error.hpp"
#include "tgat/json_util.hpp"

namespace tgat::synth {

namespace fs = std::filesystem;
using numerics::CounterRng;

namespace {

constexpr std::size_t kClasses = 2;

const char* const kLabels[] = {"FC3", "FCz", "FC4", "C3",  "Cz", "C4",  "CP3", "CP4", "F3",  "Fz",  "F4",
                               "P3",  "Pz",  "P4",  "C5",  "C6", "FC1", "FC2", "CP1", "CP2", "O1",  "O2"};

std::string channel_label(std::size_t i) {
  constexpr std::size_t n = sizeof kLabels / sizeof kLabels[0];
  return i < n ? kLabels[i] : "E" + std::to_string(i + 1);
}

std::size_t samples(double seconds, double fs) { return static_cast<std::size_t>(std::llround(seconds * fs)); }

const char* timing_name(Timing t) { return t == Timing::uniform ? "uniform" : "localized"; }

}  // namespace

void SynthConfig::validate() const {
  if (n_subjects == 0) throw ConfigError("synth.n_subjects must be positive");
  if (trials_per_class == 0) throw ConfigError("synth.trials_per_class must be positive");
  if (channels < 2) throw ConfigError("synth.channels must be at least 2");
  if (!(sample_rate > 0.0)) throw ConfigError("synth.sample_rate must be positive");
  if (!(lead_s >= 0.0)) throw ConfigError("synth.lead_s must be non-negative");
  if (!(trial_length_s >= kWindowEnd))
    throw ConfigError("synth layout: trial_length_s must cover the task window ending at 15 s");
  if (!(gap_s >= 0.0)) throw ConfigError("synth layout: negative gap_s makes consecutive trials overlap");
  if (!(noise_exponent >= 0.0)) throw ConfigError("synth.noise_exponent must be non-negative");
  if (!(line_noise_amplitude >= 0.0) || !(drift_amplitude >= 0.0) || !(signal_amplitude >= 0.0))
    throw ConfigError("synth amplitudes must be non-negative");
  if (!(drift_hz > 0.0 && drift_hz < 0.1)) throw ConfigError("synth.drift_hz must lie in (0, 0.1)");
  if (!(signal_low_hz > 0.0 && signal_low_hz < signal_high_hz && signal_high_hz < sample_rate / 2.0))
    throw ConfigError("synth signal band must satisfy 0 < low < high < sample_rate/2");
  for (auto c : signal_channels)
    if (c >= channels) throw ConfigError("synth.signal_channels: index " + std::to_string(c) + " out of range");
  if (localized_segments.size() != kClasses)
    throw ConfigError("synth.localized_segments needs one segment index per class");
  for (auto s : localized_segments)
    if (s >= kWindowSegments) throw ConfigError("synth.localized_segments: index must lie in 0..5");
}

std::size_t SynthConfig::trial_stride() const { return samples(trial_length_s + gap_s, sample_rate); }

std::size_t SynthConfig::recording_length() const {
  return 2 * samples(lead_s, sample_rate) + kClasses * trials_per_class * trial_stride();
}

SynthConfig preset(const std::string& name) {
  SynthConfig c;
  if (name == "separable") return c;
  if (name == "temporal") {
    c.signal_amplitude = 1.0;
    c.timing = Timing::localized;
    return c;
  }
  throw ConfigError("synth: unknown preset '" + name + "' (expected separable or temporal)");
}

nlohmann::json to_json(const SynthConfig& c) {
  return {{"n_subjects", c.n_subjects},
          {"trials_per_class", c.trials_per_class},
          {"channels", c.channels},
          {"sample_rate", c.sample_rate},
          {"lead_s", c.lead_s},
          {"trial_length_s", c.trial_length_s},
          {"gap_s", c.gap_s},
          {"noise_exponent", c.noise_exponent},
          {"line_noise_amplitude", c.line_noise_amplitude},
          {"drift_amplitude", c.drift_amplitude},
          {"drift_hz", c.drift_hz},
          {"signal_low_hz", c.signal_low_hz},
          {"signal_high_hz", c.signal_high_hz},
          {"signal_amplitude", c.signal_amplitude},
          {"signal_channels", c.signal_channels},
          {"timing", timing_name(c.timing)},
          {"localized_segments", c.localized_segments}};
}

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  using json_util::read;
  constexpr std::string_view s = "synth";
  json_util::reject_unknown(j,
                            {"preset", "n_subjects", "trials_per_class", "channels", "sample_rate", "lead_s",
                             "trial_length_s", "gap_s", "noise_exponent", "line_noise_amplitude", "drift_amplitude",
                             "drift_hz", "signal_low_hz", "signal_high_hz", "signal_amplitude", "signal_channels",
                             "timing", "localized_segments"},
                            s);
  std::string name = "separable";
  read(j, "preset", name, s);
  SynthConfig c = preset(name);
  read(j, "n_subjects", c.n_subjects, s);
  read(j, "trials_per_class", c.trials_per_class, s);
  read(j, "channels", c.channels, s);
  read(j, "sample_rate", c.sample_rate, s);
  read(j, "lead_s", c.lead_s, s);
  read(j, "trial_length_s", c.trial_length_s, s);
  read(j, "gap_s", c.gap_s, s);
  read(j, "noise_exponent", c.noise_exponent, s);
  read(j, "line_noise_amplitude", c.line_noise_amplitude, s);
  read(j, "drift_amplitude", c.drift_amplitude, s);
  read(j, "drift_hz", c.drift_hz, s);
  read(j, "signal_low_hz", c.signal_low_hz, s);
  read(j, "signal_high_hz", c.signal_high_hz, s);
  read(j, "signal_amplitude", c.signal_amplitude, s);
  read(j, "signal_channels", c.signal_channels, s);
  read(j, "localized_segments", c.localized_segments, s);
  if (j.contains("timing")) {
    std::string t;
    read(j, "timing", t, s);
    if (t == "uniform")
      c.timing = Timing::uniform;
    else if (t == "localized")
      c.timing = Timing::localized;
    else
      throw ConfigError("synth.timing: expected 'uniform' or 'localized', got '" + t + "'");
  }
  c.validate();
  return c;
}

std::vector<double> colored_noise(std::size_t n, double gamma, CounterRng& rng) {
  if (n < 2) throw ParameterError("colored_noise: need at least 2 samples");
  const std::size_t bins = n / 2 + 1;
  double* x = fftw_alloc_real(n);
  fftw_complex* spec = fftw_alloc_complex(bins);
  fftw_plan fwd, inv;
  // the FFTW planner is not thread-safe
#pragma omp critical(tgat_fftw_planner)
  {
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), x, spec, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec, x, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) x[i] = rng.normal();
  fftw_execute(fwd);
  spec[0][0] = spec[0][1] = 0.0;
  for (std::size_t k = 1; k < bins; ++k) {
    const double g = std::pow(static_cast<double>(k), -gamma / 2.0);
    spec[k][0] *= g;
    spec[k][1] *= g;
  }
  fftw_execute(inv);

  std::vector<double> out(x, x + n);
#pragma omp critical(tgat_fftw_planner)
  {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  fftw_free(x);
  fftw_free(spec);

  double mean = 0.0, var = 0.0;
  for (double v : out) mean += v;
  mean /= static_cast<double>(n);
  for (double v : out) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  for (double& v : out) v = (v - mean) / sd;
  return out;
}

std::vector<double> hann_burst(std::size_t n, double freq_hz, double fs, double rms, double phase) {
  std::vector<double> b(n);
  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
    b[i] = w * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / fs + phase);
    energy += b[i] * b[i];
  }
  if (energy > 0.0) {
    const double scale = rms / std::sqrt(energy / static_cast<double>(n));
    for (double& v : b) v *= scale;
  }
  return b;
}

double burst_frequency(const SynthConfig& cfg, int label, CounterRng& rng) {
  const double width = (cfg.signal_high_hz - cfg.signal_low_hz) / static_cast<double>(kClasses);
  const double lo = cfg.signal_low_hz + width * static_cast<double>(label);
  return rng.uniform(lo, lo + width);
}

std::vector<std::size_t> burst_segments(const SynthConfig& cfg, int label) {
  if (cfg.timing == Timing::localized) return {cfg.localized_segments.at(static_cast<std::size_t>(label))};
  std::vector<std::size_t> all(kWindowSegments);
  for (std::size_t s = 0; s < all.size(); ++s) all[s] = s;
  return all;
}

std::string subject_name(std::size_t subject) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sub%02zu", subject + 1);
  return buf;
}

dsp::Recording generate_recording(const SynthConfig& cfg, std::size_t subject, CounterRng rng) {
  cfg.validate();
  const double fs = cfg.sample_rate;
  const std::size_t n = cfg.recording_length();
  const std::size_t trials = kClasses * cfg.trials_per_class;

  dsp::Recording r;
  r.sample_rate = fs;
  r.subject_id = subject_name(subject);
  for (std::size_t c = 0; c < cfg.channels; ++c) r.channel_labels.push_back(channel_label(c));

  r.samples.resize(cfg.channels);
  for (std::size_t c = 0; c < cfg.channels; ++c) {
    CounterRng noise_rng = rng.split(2).split(c);
    r.samples[c] = colored_noise(n, cfg.noise_exponent, noise_rng);
    CounterRng phase_rng = rng.split(3).split(c);
    const double line_phase = phase_rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double drift_phase = phase_rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / fs;
      r.samples[c][i] += cfg.line_noise_amplitude * std::sin(2.0 * std::numbers::pi * 50.0 * t + line_phase) +
                         cfg.drift_amplitude * std::sin(2.0 * std::numbers::pi * cfg.drift_hz * t + drift_phase);
    }
  }

  std::vector<int> labels(trials);
  for (std::size_t t = 0; t < trials; ++t) labels[t] = static_cast<int>(t / cfg.trials_per_class);
  CounterRng order_rng = rng.split(1);
  for (std::size_t i = trials; i > 1; --i) std::swap(labels[i - 1], labels[order_rng.below(i)]);

  // a burst shared by every channel would be pure common mode and vanish under CAR
  std::vector<std::size_t> targets = cfg.signal_channels;
  if (targets.empty())
    for (std::size_t c = 0; c < (cfg.channels + 1) / 2; ++c) targets.push_back(c);

  const std::size_t lead = samples(cfg.lead_s, fs);
  const std::size_t seg_len = samples(1.0, fs);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t onset = lead + t * cfg.trial_stride();
    char id[32];
    std::snprintf(id, sizeof id, "trial%03zu", t + 1);
    r.events.push_back({onset, accepted_markers().at(static_cast<std::size_t>(labels[t])), id});
    r.events.push_back({onset + samples(cfg.trial_length_s, fs), kRestMarker, id});

    if (cfg.signal_amplitude == 0.0) continue;
    CounterRng burst_rng = rng.split(4).split(t);
    for (std::size_t s : burst_segments(cfg, labels[t])) {
      const double f = burst_frequency(cfg, labels[t], burst_rng);
      const double phase = burst_rng.uniform(0.0, 2.0 * std::numbers::pi);
      const auto b = hann_burst(seg_len, f, fs, cfg.signal_amplitude, phase);
      const std::size_t start = onset + samples(kWindowStart + static_cast<double>(s), fs);
      for (std::size_t c : targets)
        for (std::size_t i = 0; i < seg_len; ++i) r.samples[c][start + i] += b[i];
    }
  }
  return r;
}

DatasetFiles generate_dataset(const SynthConfig& cfg, const fs::path& dir) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  DatasetFiles out;
  out.headers.resize(cfg.n_subjects);
  std::vector<std::exception_ptr> errors(cfg.n_subjects);
  const CounterRng root = CounterRng(cfg.seed).split(0x5E7);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t s = 0; s < cfg.n_subjects; ++s) {
    try {
      out.headers[s] = dsp::write_tgr(generate_recording(cfg, s, root.split(s)), dir / (subject_name(s) + ".json"));
    } catch (...) {
      errors[s] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  nlohmann::json files = nlohmann::json::array();
  for (std::size_t s = 0; s < cfg.n_subjects; ++s)
    files.push_back({{"subject_id", subject_name(s)},
                     {"header", out.headers[s].filename().string()},
                     {"data", subject_name(s) + ".bin"}});
  nlohmann::json manifest = {{"version", 1},
                             {"seed", cfg.seed},
                             {"files", files},
                             {"label_map", label_map()},
                             {"accepted_markers", accepted_markers()},
                             {"config", to_json(cfg)}};
  out.manifest = dir / "manifest.json";
  binary::write_text(out.manifest, manifest.dump(2) + "\n");
  return out;
}

}  // namespace tgat::synth
