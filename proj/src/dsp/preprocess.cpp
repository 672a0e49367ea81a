#include "tgat/dsp/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tgat/dsp/filter.hpp"
#include "tgat/dsp/resample.hpp"
#include "tgat/error.hpp"

namespace tgat::dsp {

void validate(const Recording& r) {
  if (!(r.sample_rate > 0.0)) throw DataError("recording: sample rate must be positive");
  if (r.channel_labels.size() != r.samples.size())
    throw DataError("recording: " + std::to_string(r.channel_labels.size()) + " labels for " +
                    std::to_string(r.samples.size()) + " channels");
  std::set<std::string> seen;
  for (const auto& l : r.channel_labels)
    if (!seen.insert(l).second) throw DataError("recording: duplicate channel label '" + l + "'");
  const std::size_t n = r.length();
  for (std::size_t c = 0; c < r.samples.size(); ++c)
    if (r.samples[c].size() != n)
      throw DataError("recording: channel '" + r.channel_labels[c] + "' has " + std::to_string(r.samples[c].size()) +
                      " samples, expected " + std::to_string(n));
  for (const auto& ev : r.events)
    if (ev.onset_sample >= n)
      throw DataError("recording: event '" + ev.marker + "' onset " + std::to_string(ev.onset_sample) +
                      " outside [0, " + std::to_string(n) + ")");
}

Recording common_average_reference(const Recording& r, const std::vector<std::string>& exclude) {
  std::vector<std::size_t> included;
  for (std::size_t c = 0; c < r.channels(); ++c)
    if (std::find(exclude.begin(), exclude.end(), r.channel_labels.at(c)) == exclude.end()) included.push_back(c);
  if (included.size() < 2)
    throw ParameterError("common_average_reference: needs at least 2 included channels, got " +
                         std::to_string(included.size()));
  Recording out = r;
  const double inv = 1.0 / static_cast<double>(included.size());
  for (std::size_t t = 0; t < r.length(); ++t) {
    double mean = 0.0;
    for (std::size_t c : included) mean += r.samples[c][t];
    mean *= inv;
    for (std::size_t c : included) out.samples[c][t] = r.samples[c][t] - mean;
  }
  return out;
}

EpochExtraction extract_epochs(const Recording& r, const std::vector<std::string>& accepted,
                               const std::map<std::string, int>& label_map, double t_start, double t_end) {
  if (r.sample_rate != kEpochRate)
    throw ParameterError("extract_epochs: recording must be at 256 Hz, got " + std::to_string(r.sample_rate));
  if (!(t_end > t_start) || t_start < 0.0) throw ParameterError("extract_epochs: need 0 <= t_start < t_end");
  for (const auto& m : accepted) {
    auto it = label_map.find(m);
    if (it == label_map.end()) throw ConfigError("extract_epochs: accepted marker '" + m + "' has no label");
    if (it->second != 0 && it->second != 1)
      throw ConfigError("extract_epochs: marker '" + m + "' maps to label " + std::to_string(it->second) +
                        ", expected 0 or 1");
  }
  const auto begin_off = static_cast<std::size_t>(std::llround(t_start * r.sample_rate));
  const auto end_off = static_cast<std::size_t>(std::llround(t_end * r.sample_rate));

  EpochExtraction out;
  for (const auto& ev : r.events) {
    if (std::find(accepted.begin(), accepted.end(), ev.marker) == accepted.end()) continue;
    const std::size_t b = ev.onset_sample + begin_off, e = ev.onset_sample + end_off;
    if (e > r.length()) {
      ++out.skipped;
      continue;
    }
    Epoch ep;
    ep.label = label_map.at(ev.marker);
    ep.trial_id = ev.trial_id;
    ep.subject_id = r.subject_id;
    ep.samples.reserve(r.channels());
    for (const auto& ch : r.samples)
      ep.samples.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(b), ch.begin() + static_cast<std::ptrdiff_t>(e));
    out.epochs.push_back(std::move(ep));
  }
  return out;
}

Epoch zscore(const Epoch& e) {
  Epoch out = e;
  for (auto& ch : out.samples) {
    if (ch.empty()) continue;
    const double n = static_cast<double>(ch.size());
    double mean = 0.0;
    for (double v : ch) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : ch) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / n);
    if (sd < 1e-8) {
      std::fill(ch.begin(), ch.end(), 0.0);
      continue;
    }
    for (double& v : ch) v = (v - mean) / sd;
  }
  return out;
}

std::vector<Segment> segment_windows(const Epoch& e) {
  const std::size_t len = e.samples.empty() ? 0 : e.samples.front().size();
  if (len == 0 || len % kSegmentLength != 0)
    throw ShapeError("segment_windows: epoch length " + std::to_string(len) + " is not a positive multiple of " +
                     std::to_string(kSegmentLength));
  std::vector<Segment> out(len / kSegmentLength);
  for (std::size_t i = 0; i < out.size(); ++i) {
    Segment& s = out[i];
    s.label = e.label;
    s.trial_id = e.trial_id;
    s.subject_id = e.subject_id;
    s.segment_index = i;
    for (const auto& ch : e.samples) {
      if (ch.size() != len) throw ShapeError("segment_windows: ragged epoch channels");
      const auto b = ch.begin() + static_cast<std::ptrdiff_t>(i * kSegmentLength);
      s.samples.emplace_back(b, b + static_cast<std::ptrdiff_t>(kSegmentLength));
    }
  }
  return out;
}

PreprocessResult preprocess(const Recording& r, const PreprocessConfig& cfg) {
  validate(r);
  Recording x = filtfilt(design_notch(cfg.notch_hz, r.sample_rate, cfg.notch_q), r);
  x = filtfilt(design_bandpass(cfg.band_low_hz, cfg.band_high_hz, r.sample_rate, cfg.band_order), x);
  x = common_average_reference(x, cfg.car_exclude);
  x = resample(x, kEpochRate);
  EpochExtraction ex = extract_epochs(x, cfg.accepted_markers, cfg.label_map, cfg.epoch_start_s, cfg.epoch_end_s);

  PreprocessResult out;
  out.epochs = ex.epochs.size();
  out.skipped_events = ex.skipped;
  for (const auto& ep : ex.epochs)
    for (auto& s : segment_windows(zscore(ep))) out.segments.push_back(std::move(s));
  return out;
}

PreprocessResult preprocess_all(const std::vector<Recording>& recs, const PreprocessConfig& cfg) {
  std::vector<PreprocessResult> parts(recs.size());
  std::vector<std::exception_ptr> errors(recs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < recs.size(); ++i) {
    try {
      parts[i] = preprocess(recs[i], cfg);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  PreprocessResult out;
  for (auto& p : parts) {
    out.epochs += p.epochs;
    out.skipped_events += p.skipped_events;
    for (auto& s : p.segments) out.segments.push_back(std::move(s));
  }
  return out;
}

}  // namespace tgat::dsp
