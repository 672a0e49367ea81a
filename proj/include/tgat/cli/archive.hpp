#pragma once

#include <filesystem>
#include <vector>

#include "tgat/dsp/recording.hpp"

namespace tgat::cli {

// Segment archive: segments.json lists every segment with its metadata and
// the byte offset of its block in segments.bin. A block is channels x 256
// little-endian float64, channel-major.

/// Throws ShapeError if segments disagree on channel count or length.
void write_archive(const std::filesystem::path& dir, const std::vector<dsp::Segment>& segments);

/// `dir` holds segments.json. DataError on malformed manifests, offsets that
/// do not match the blob, or a blob of the wrong size.
std::vector<dsp::Segment> read_archive(const std::filesystem::path& dir);

}  // namespace tgat::cli
