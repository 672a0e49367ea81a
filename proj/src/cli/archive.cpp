#include "tgat/cli/archive.hpp"

#include "json.hpp"
#include "tgat/binary_io.hpp"
#include "tgat/dsp/preprocess.hpp"
#include "tgat/error.hpp"

namespace tgat::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
constexpr const char* kManifest = "segments.json";
constexpr const char* kBlob = "segments.bin";
}  // namespace

void write_archive(const fs::path& dir, const std::vector<dsp::Segment>& segments) {
  const std::size_t channels = segments.empty() ? 0 : segments.front().samples.size();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  std::ofstream blob = binary::open_out(dir / kBlob);
  json entries = json::array();
  std::uint64_t offset = 0;
  for (const auto& s : segments) {
    if (s.samples.size() != channels)
      throw ShapeError("write_archive: segments with " + std::to_string(channels) + " and " +
                       std::to_string(s.samples.size()) + " channels");
    for (const auto& ch : s.samples) {
      if (ch.size() != dsp::kSegmentLength) throw ShapeError("write_archive: segment length must be 256");
      binary::write_f64(blob, ch);
    }
    entries.push_back({{"offset", offset},
                       {"label", s.label},
                       {"trial_id", s.trial_id},
                       {"subject_id", s.subject_id},
                       {"segment_index", s.segment_index}});
    offset += channels * dsp::kSegmentLength * sizeof(double);
  }
  blob.close();
  if (!blob) throw IoError("failed writing '" + (dir / kBlob).string() + "'");

  const json manifest = {{"version", 1},
                         {"blob", kBlob},
                         {"channels", channels},
                         {"segment_length", dsp::kSegmentLength},
                         {"segments", std::move(entries)}};
  binary::write_text(dir / kManifest, manifest.dump(1) + "\n");
}

std::vector<dsp::Segment> read_archive(const fs::path& dir) {
  const fs::path mpath = dir / kManifest;
  json m;
  try {
    m = json::parse(binary::read_text(mpath));
  } catch (const json::parse_error& e) {
    throw DataError("'" + mpath.string() + "': " + e.what());
  }

  std::vector<dsp::Segment> out;
  try {
    if (m.at("version").get<int>() != 1) throw DataError("'" + mpath.string() + "': unsupported archive version");
    const auto channels = m.at("channels").get<std::size_t>();
    if (m.at("segment_length").get<std::size_t>() != dsp::kSegmentLength)
      throw DataError("'" + mpath.string() + "': segment_length must be 256");
    const fs::path bpath = dir / m.at("blob").get<std::string>();
    const std::uint64_t block = channels * dsp::kSegmentLength * sizeof(double);
    const auto& entries = m.at("segments");
    if (!entries.empty() && channels == 0) throw DataError("'" + mpath.string() + "': zero channels");

    std::error_code ec;
    const auto size = fs::file_size(bpath, ec);
    if (ec) throw IoError("cannot stat '" + bpath.string() + "': " + ec.message());
    if (size != block * entries.size())
      throw DataError("'" + bpath.string() + "': " + std::to_string(size) + " bytes, manifest implies " +
                      std::to_string(block * entries.size()));

    std::ifstream blob = binary::open_in(bpath);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const json& e = entries[i];
      if (e.at("offset").get<std::uint64_t>() != i * block)
        throw DataError("'" + mpath.string() + "': segment " + std::to_string(i) + " has an out-of-order offset");
      dsp::Segment s;
      s.label = e.at("label").get<int>();
      s.trial_id = e.at("trial_id").get<std::string>();
      s.subject_id = e.at("subject_id").get<std::string>();
      s.segment_index = e.at("segment_index").get<std::size_t>();
      s.samples.assign(channels, std::vector<double>(dsp::kSegmentLength));
      for (auto& ch : s.samples) binary::read_f64(blob, ch);
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw DataError("'" + mpath.string() + "': malformed archive manifest: " + e.what());
  }
  return out;
}

}  // namespace tgat::cli
