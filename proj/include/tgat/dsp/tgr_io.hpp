#pragma once

#include <filesystem>

#include "tgat/dsp/recording.hpp"

namespace tgat::dsp {

// TGR v1: a JSON header plus a sibling binary of little-endian float64,
// channel-major (all of channel 0, then channel 1, ...).
//
// header: {"version": 1, "sample_rate": fs, "channel_labels": [...],
//          "subject_id": "...", "n_samples": N, "data_file": "x.bin",
//          "trials": [{"onset_sample": i, "marker": "...", "trial_id": "..."}]}

/// Writes `<stem>.json` and `<stem>.bin` next to each other; returns the header path.
std::filesystem::path write_tgr(const Recording& r, const std::filesystem::path& header_path);

/// Throws IoError if files are unreadable, DataError if the header is
/// malformed or the binary size disagrees with the header.
Recording read_tgr(const std::filesystem::path& header_path);

}  // namespace tgat::dsp
