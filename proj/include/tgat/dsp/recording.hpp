#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tgat::dsp {

using Channels = std::vector<std::vector<double>>;  // [channel][sample]

struct Event {
  std::size_t onset_sample = 0;
  std::string marker;
  std::string trial_id;
};

struct Recording {
  std::vector<std::string> channel_labels;
  double sample_rate = 0.0;
  Channels samples;
  std::vector<Event> events;
  std::string subject_id;

  std::size_t channels() const noexcept { return samples.size(); }
  std::size_t length() const noexcept { return samples.empty() ? 0 : samples.front().size(); }
};

/// Throws DataError on ragged channels, label/channel count mismatch,
/// duplicate labels, non-positive rate or out-of-range event onsets.
void validate(const Recording& r);

struct Epoch {
  Channels samples;
  int label = 0;
  std::string trial_id;
  std::string subject_id;
};

struct Segment {
  Channels samples;
  int label = 0;
  std::string trial_id;
  std::string subject_id;
  std::size_t segment_index = 0;
};

}  // namespace tgat::dsp
