#include "tgat/dsp/tgr_io.hpp"

#include "json.hpp"
#include "tgat/binary_io.hpp"
#include "tgat/error.hpp"

namespace tgat::dsp {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path write_tgr(const Recording& r, const fs::path& header_path) {
  validate(r);
  fs::path bin_path = header_path;
  bin_path.replace_extension(".bin");

  json h;
  h["version"] = 1;
  h["sample_rate"] = r.sample_rate;
  h["channel_labels"] = r.channel_labels;
  h["subject_id"] = r.subject_id;
  h["n_samples"] = r.length();
  h["data_file"] = bin_path.filename().string();
  json trials = json::array();
  for (const auto& ev : r.events)
    trials.push_back({{"onset_sample", ev.onset_sample}, {"marker", ev.marker}, {"trial_id", ev.trial_id}});
  h["trials"] = std::move(trials);

  if (header_path.has_parent_path()) fs::create_directories(header_path.parent_path());
  binary::write_text(header_path, h.dump(2) + "\n");
  std::ofstream os = binary::open_out(bin_path);
  for (const auto& ch : r.samples) binary::write_f64(os, ch);
  if (!os) throw IoError("failed writing '" + bin_path.string() + "'");
  return header_path;
}

Recording read_tgr(const fs::path& header_path) {
  json h;
  try {
    h = json::parse(binary::read_text(header_path));
  } catch (const json::parse_error& e) {
    throw DataError("'" + header_path.string() + "': invalid JSON header: " + e.what());
  }

  Recording r;
  std::size_t n = 0;
  fs::path bin_path;
  try {
    if (h.at("version").get<int>() != 1)
      throw DataError("'" + header_path.string() + "': unsupported TGR version " + h.at("version").dump());
    r.sample_rate = h.at("sample_rate").get<double>();
    r.channel_labels = h.at("channel_labels").get<std::vector<std::string>>();
    r.subject_id = h.at("subject_id").get<std::string>();
    n = h.at("n_samples").get<std::size_t>();
    bin_path = header_path.parent_path() / h.at("data_file").get<std::string>();
    for (const auto& t : h.at("trials"))
      r.events.push_back({t.at("onset_sample").get<std::size_t>(), t.at("marker").get<std::string>(),
                          t.at("trial_id").get<std::string>()});
  } catch (const json::exception& e) {
    throw DataError("'" + header_path.string() + "': malformed header: " + e.what());
  }

  const std::uintmax_t expected = r.channel_labels.size() * n * sizeof(double);
  std::error_code ec;
  const std::uintmax_t actual = fs::file_size(bin_path, ec);
  if (ec) throw IoError("cannot stat '" + bin_path.string() + "': " + ec.message());
  if (actual != expected)
    throw DataError("'" + bin_path.string() + "' holds " + std::to_string(actual) + " bytes, header implies " +
                    std::to_string(expected));

  std::ifstream is = binary::open_in(bin_path);
  r.samples.assign(r.channel_labels.size(), std::vector<double>(n));
  for (auto& ch : r.samples) binary::read_f64(is, ch);
  validate(r);
  return r;
}

}  // namespace tgat::dsp
