#pragma once

#include <map>
#include <string>
#include <vector>

#include "tgat/dsp/recording.hpp"

namespace tgat::dsp {

inline constexpr double kEpochRate = 256.0;
inline constexpr std::size_t kSegmentLength = 256;

/// Subtracts the per-sample mean of the included channels from each of them;
/// channels named in `exclude` are left untouched.
Recording common_average_reference(const Recording& r, const std::vector<std::string>& exclude);

struct EpochExtraction {
  std::vector<Epoch> epochs;
  std::size_t skipped = 0;  // windows that ran past the recording
};

/// Slices [onset + t_start*fs, onset + t_end*fs) for every event whose marker
/// is in `accepted`; labels come from `label_map`.
EpochExtraction extract_epochs(const Recording& r, const std::vector<std::string>& accepted,
                               const std::map<std::string, int>& label_map, double t_start = 9.0,
                               double t_end = 15.0);

/// Per channel: subtract the mean, divide by the population std. Channels with
/// std < 1e-8 become zeros.
Epoch zscore(const Epoch& e);

/// Contiguous non-overlapping windows of kSegmentLength samples.
std::vector<Segment> segment_windows(const Epoch& e);

struct PreprocessConfig {
  double notch_hz = 50.0;
  double notch_q = 30.0;
  double band_low_hz = 0.1;
  double band_high_hz = 40.0;
  int band_order = 4;
  std::vector<std::string> car_exclude{"VEOG"};
  std::vector<std::string> accepted_markers;
  std::map<std::string, int> label_map;
  double epoch_start_s = 9.0;
  double epoch_end_s = 15.0;
};

struct PreprocessResult {
  std::vector<Segment> segments;
  std::size_t epochs = 0;
  std::size_t skipped_events = 0;
};

/// notch -> band-pass -> CAR -> resample to 256 Hz -> epoch -> z-score -> window.
PreprocessResult preprocess(const Recording& r, const PreprocessConfig& cfg);

/// Recordings are processed in parallel; segments keep the input order.
PreprocessResult preprocess_all(const std::vector<Recording>& recs, const PreprocessConfig& cfg);

}  // namespace tgat::dsp
