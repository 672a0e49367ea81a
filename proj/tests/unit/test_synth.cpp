#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "tgat/binary_io.hpp"
#include "tgat/dsp/preprocess.hpp"
#include "tgat/dsp/tgr_io.hpp"
#include "tgat/error.hpp"
#include "tgat/synth/synth.hpp"

using namespace tgat;
using namespace tgat::synth;
using numerics::CounterRng;
namespace fs = std::filesystem;

namespace {

SynthConfig small(std::size_t trials_per_class = 4) {
  SynthConfig c;
  c.trials_per_class = trials_per_class;
  c.channels = 4;
  return c;
}

// Mean-square content of bins [lo, hi] Hz of x[start, start+n), by direct DFT.
double band_power(const std::vector<double>& x, std::size_t start, std::size_t n, double fs, double lo, double hi) {
  double p = 0.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    if (f < lo || f > hi) continue;
    std::complex<double> acc;
    for (std::size_t i = 0; i < n; ++i)
      acc += x[start + i] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * i) / static_cast<double>(n));
    p += 2.0 * std::norm(acc) / static_cast<double>(n * n);
  }
  return p;
}

std::map<std::string, int> labels_of(const dsp::Recording& r) {
  std::map<std::string, int> m;
  for (const auto& e : r.events)
    if (auto it = label_map().find(e.marker); it != label_map().end()) m[e.trial_id] = it->second;
  return m;
}

// Welch statistic; |z| < 2.576 is p > 0.01 two-sided under the normal approximation.
double welch_z(const std::vector<double>& a, const std::vector<double>& b) {
  auto mv = [](const std::vector<double>& v) {
    double m = 0.0, s = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, s / static_cast<double>(v.size() - 1)};
  };
  const auto [ma, va] = mv(a);
  const auto [mb, vb] = mv(b);
  return (ma - mb) / std::sqrt(va / static_cast<double>(a.size()) + vb / static_cast<double>(b.size()));
}

}  // namespace

TEST_CASE("recording layout and events") {
  const SynthConfig c = small(5);
  const dsp::Recording r = generate_recording(c, 0, CounterRng(1));
  CHECK_NOTHROW(dsp::validate(r));
  CHECK(r.channels() == 4);
  CHECK(r.length() == c.recording_length());
  CHECK(r.length() == 2 * 512 + 10 * 18 * 256);
  CHECK(r.subject_id == "sub01");

  std::size_t accepted = 0, rest = 0;
  for (const auto& e : r.events) {
    if (label_map().count(e.marker)) ++accepted;
    if (e.marker == kRestMarker) ++rest;
  }
  CHECK(accepted == 2 * c.trials_per_class);
  CHECK(rest == accepted);
  const auto labels = labels_of(r);
  CHECK(std::count_if(labels.begin(), labels.end(), [](const auto& kv) { return kv.second == 1; }) == 5);
  CHECK(r.events.front().onset_sample == 512);
}

TEST_CASE("colored noise has unit variance and a 1/f^gamma spectrum") {
  for (double gamma : {0.0, 1.0, 2.0}) {
    CounterRng rng(7);
    const std::size_t n = 1 << 16;
    const auto x = colored_noise(n, gamma, rng);
    double m = 0.0, v = 0.0;
    for (double s : x) m += s;
    m /= n;
    for (double s : x) v += (s - m) * (s - m);
    CHECK(std::abs(m) < 1e-12);
    CHECK(std::abs(v / n - 1.0) < 1e-12);

    // log-log slope of octave-band powers
    std::vector<double> lx, ly;
    for (double f0 = 2.0; f0 < 64.0; f0 *= 2.0) {
      const double p = band_power(x, 0, 1024, 256.0, f0, 2.0 * f0 - 0.5);
      double avg = p;
      for (std::size_t w = 1; w < 32; ++w) avg += band_power(x, w * 1024, 1024, 256.0, f0, 2.0 * f0 - 0.5);
      lx.push_back(std::log(f0));
      ly.push_back(std::log(avg / (f0 * 4.0)));  // per-bin density
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
    CHECK(std::abs(sxy / sxx + gamma) < 0.15);
  }
}

TEST_CASE("hann burst has the requested RMS and vanishing edges") {
  const auto b = hann_burst(256, 10.0, 256.0, 1.5, 0.3);
  double e = 0.0;
  for (double v : b) e += v * v;
  CHECK(std::sqrt(e / 256.0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(std::abs(b.front()) < 0.01);
  CHECK(std::abs(b.back()) < 0.05);
}

TEST_CASE("class sub-bands and timing") {
  SynthConfig c;
  CounterRng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double f0 = burst_frequency(c, 0, rng), f1 = burst_frequency(c, 1, rng);
    CHECK(f0 >= 8.0);
    CHECK(f0 <= 10.5);
    CHECK(f1 >= 10.5);
    CHECK(f1 <= 13.0);
  }
  CHECK(burst_segments(c, 0).size() == 6);
  c.timing = Timing::localized;
  CHECK(burst_segments(c, 0) == std::vector<std::size_t>{1});
  CHECK(burst_segments(c, 1) == std::vector<std::size_t>{4});
}

TEST_CASE("zero signal amplitude leaves the classes indistinguishable") {
  SynthConfig c;
  c.trials_per_class = 100;
  c.channels = 2;
  c.signal_amplitude = 0.0;
  const dsp::Recording r = generate_recording(c, 0, CounterRng(11));
  const std::size_t seg = 256;
  std::vector<double> mean0, mean1, pow0, pow1;
  for (const auto& e : r.events) {
    auto it = label_map().find(e.marker);
    if (it == label_map().end()) continue;
    const std::size_t start = e.onset_sample + 9 * 256;
    double m = 0.0;
    for (std::size_t i = 0; i < 6 * seg; ++i) m += r.samples[0][start + i];
    (it->second == 0 ? mean0 : mean1).push_back(m / (6 * seg));
    (it->second == 0 ? pow0 : pow1).push_back(band_power(r.samples[0], start, seg, 256.0, 8.0, 13.0));
  }
  REQUIRE(mean0.size() == 100);
  REQUIRE(mean1.size() == 100);
  CHECK(std::abs(welch_z(mean0, mean1)) < 2.576);
  CHECK(std::abs(welch_z(pow0, pow1)) < 2.576);
}

TEST_CASE("localized bursts raise band power only in the designated segment") {
  SynthConfig c = preset("temporal");
  c.trials_per_class = 60;
  c.channels = 2;
  c.signal_channels = {1};
  const dsp::Recording r = generate_recording(c, 0, CounterRng(5));
  for (int label : {0, 1}) {
    const std::size_t target = c.localized_segments[static_cast<std::size_t>(label)];
    double excess = 0.0, quiet = 0.0;
    std::size_t n = 0;
    for (const auto& e : r.events) {
      auto it = label_map().find(e.marker);
      if (it == label_map().end() || it->second != label) continue;
      double others = 0.0;
      for (std::size_t s = 0; s < 6; ++s) {
        const std::size_t start = e.onset_sample + (9 + s) * 256;
        const double p = band_power(r.samples[1], start, 256, 256.0, 5.0, 16.0);
        if (s == target)
          excess += p;
        else
          others += p / 5.0;
      }
      excess -= others;
      // channel 0 carries no signal at all
      quiet += band_power(r.samples[0], e.onset_sample + (9 + target) * 256, 256, 256.0, 5.0, 16.0) -
               band_power(r.samples[0], e.onset_sample + (9 + (target + 1) % 6) * 256, 256, 256.0, 5.0, 16.0);
      ++n;
    }
    const double rms = std::sqrt(excess / static_cast<double>(n));
    CHECK(rms / c.signal_amplitude > 0.8);
    CHECK(rms / c.signal_amplitude < 1.2);
    CHECK(std::abs(quiet / static_cast<double>(n)) < 0.1);
  }
}

TEST_CASE("config validation, presets and json") {
  SynthConfig c;
  CHECK_NOTHROW(c.validate());
  c.gap_s = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SynthConfig{};
  c.trial_length_s = 14.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SynthConfig{};
  c.localized_segments = {1, 6};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SynthConfig{};
  c.signal_high_hz = 200.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SynthConfig{};
  c.signal_amplitude = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SynthConfig{};
  c.signal_channels = {8};
  CHECK_THROWS_AS(c.validate(), ConfigError);

  CHECK(preset("separable").signal_amplitude == 2.0);
  CHECK(preset("separable").channels == 8);
  CHECK(preset("separable").trials_per_class == 40);
  CHECK(preset("temporal").timing == Timing::localized);
  CHECK(preset("temporal").signal_amplitude == 1.0);
  CHECK_THROWS_AS(preset("hard"), ConfigError);

  SynthConfig t = synth_config_from_json({{"preset", "temporal"}, {"channels", 6}});
  CHECK(t.channels == 6);
  CHECK(t.timing == Timing::localized);
  CHECK(to_json(synth_config_from_json(to_json(t))) == to_json(t));
  CHECK_THROWS_AS(synth_config_from_json({{"chanels", 6}}), ConfigError);
  CHECK_THROWS_AS(synth_config_from_json({{"timing", "sometimes"}}), ConfigError);
  CHECK_THROWS_AS(synth_config_from_json({{"channels", "six"}}), ConfigError);
}

TEST_CASE("dataset files, manifest and determinism") {
  const fs::path a = fs::temp_directory_path() / "tgat_synth_a", b = fs::temp_directory_path() / "tgat_synth_b",
                 d = fs::temp_directory_path() / "tgat_synth_d";
  for (const auto& p : {a, b, d}) fs::remove_all(p);
  SynthConfig c = small(3);
  c.n_subjects = 3;
  c.seed = 42;
  const DatasetFiles fa = generate_dataset(c, a);
  generate_dataset(c, b);
  c.seed = 43;
  generate_dataset(c, d);

  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    const auto name = e.path().filename();
    CHECK(binary::read_text(a / name) == binary::read_text(b / name));
  }
  CHECK(files == 7);
  CHECK(binary::read_text(a / "sub02.bin") != binary::read_text(d / "sub02.bin"));
  CHECK(binary::read_text(a / "sub01.bin") != binary::read_text(a / "sub02.bin"));

  const auto m = nlohmann::json::parse(binary::read_text(fa.manifest));
  CHECK(m["seed"] == 42);
  CHECK(m["files"].size() == 3);
  CHECK(m["label_map"]["S  2"] == 1);
  CHECK(m["config"]["trials_per_class"] == 3);

  // the manifest's label map drives the preprocessing chain
  dsp::PreprocessConfig pc;
  pc.label_map = m["label_map"].get<std::map<std::string, int>>();
  pc.accepted_markers = m["accepted_markers"].get<std::vector<std::string>>();
  std::vector<dsp::Recording> recs;
  for (const auto& f : m["files"]) recs.push_back(dsp::read_tgr(a / f["header"].get<std::string>()));
  const auto res = dsp::preprocess_all(recs, pc);
  CHECK(res.skipped_events == 0);
  CHECK(res.epochs == 3 * 6);
  CHECK(res.segments.size() == 3 * 6 * 6);
  const auto ones = std::count_if(res.segments.begin(), res.segments.end(), [](const auto& s) { return s.label == 1; });
  CHECK(static_cast<std::size_t>(ones) * 2 == res.segments.size());

  for (const auto& p : {a, b, d}) fs::remove_all(p);
}

TEST_CASE("non-256 Hz recordings survive the pipeline") {
  SynthConfig c = small(2);
  c.sample_rate = 500.0;
  const dsp::Recording r = generate_recording(c, 0, CounterRng(2));
  dsp::PreprocessConfig pc;
  pc.label_map = label_map();
  pc.accepted_markers = accepted_markers();
  const auto res = dsp::preprocess(r, pc);
  CHECK(res.skipped_events == 0);
  CHECK(res.segments.size() == 4 * 6);
  CHECK(res.segments.front().samples.front().size() == 256);
}

TEST_CASE("unwritable output directory is an I/O error") {
  const fs::path blocker = fs::temp_directory_path() / "tgat_synth_blocker";
  fs::remove_all(blocker);
  binary::write_text(blocker, "x");
  CHECK_THROWS_AS(generate_dataset(small(1), blocker / "out"), IoError);
  fs::remove_all(blocker);
}
