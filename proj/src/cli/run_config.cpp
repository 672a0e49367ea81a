#include "tgat/cli/run_config.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "tgat/binary_io.hpp"
#include "tgat/error.hpp"
#include "tgat/json_util.hpp"

namespace tgat::cli {

namespace fs = std::filesystem;
using nlohmann::json;

dsp::PreprocessConfig RunConfig::default_preprocess() {
  dsp::PreprocessConfig p;
  p.accepted_markers = synth::accepted_markers();
  p.label_map = synth::label_map();
  return p;
}

void RunConfig::resolve() {
  synth.seed = seed;
  train.seed = seed;
  synth.validate();
  model.validate();
  train.validate();
  if (preprocess.accepted_markers.empty()) throw ConfigError("preprocess.accepted_markers must not be empty");
  for (const auto& m : preprocess.accepted_markers) {
    auto it = preprocess.label_map.find(m);
    if (it == preprocess.label_map.end())
      throw ConfigError("preprocess.label_map has no label for accepted marker '" + m + "'");
    if (it->second < 0 || static_cast<std::size_t>(it->second) >= model.classes)
      throw ConfigError("preprocess.label_map: label " + std::to_string(it->second) + " of '" + m +
                        "' is outside the model's classes");
  }
  if (!(preprocess.epoch_end_s > preprocess.epoch_start_s))
    throw ConfigError("preprocess.epoch_end_s must exceed epoch_start_s");
}

json to_json(const dsp::PreprocessConfig& c) {
  return {{"notch_hz", c.notch_hz},
          {"notch_q", c.notch_q},
          {"band_low_hz", c.band_low_hz},
          {"band_high_hz", c.band_high_hz},
          {"band_order", c.band_order},
          {"car_exclude", c.car_exclude},
          {"accepted_markers", c.accepted_markers},
          {"label_map", c.label_map},
          {"epoch_start_s", c.epoch_start_s},
          {"epoch_end_s", c.epoch_end_s}};
}

dsp::PreprocessConfig preprocess_config_from_json(const json& j) {
  using json_util::read;
  constexpr std::string_view s = "preprocess";
  json_util::reject_unknown(j,
                            {"notch_hz", "notch_q", "band_low_hz", "band_high_hz", "band_order", "car_exclude",
                             "accepted_markers", "label_map", "epoch_start_s", "epoch_end_s"},
                            s);
  dsp::PreprocessConfig c = RunConfig::default_preprocess();
  read(j, "notch_hz", c.notch_hz, s);
  read(j, "notch_q", c.notch_q, s);
  read(j, "band_low_hz", c.band_low_hz, s);
  read(j, "band_high_hz", c.band_high_hz, s);
  read(j, "band_order", c.band_order, s);
  read(j, "car_exclude", c.car_exclude, s);
  read(j, "accepted_markers", c.accepted_markers, s);
  read(j, "label_map", c.label_map, s);
  read(j, "epoch_start_s", c.epoch_start_s, s);
  read(j, "epoch_end_s", c.epoch_end_s, s);
  return c;
}

json to_json(const RunConfig& c) {
  return {{"seed", c.seed},
          {"synth", synth::to_json(c.synth)},
          {"preprocess", to_json(c.preprocess)},
          {"model", model::to_json(c.model)},
          {"train", train::to_json(c.train)},
          {"paths", {{"input", c.paths.input}, {"output", c.paths.output}}}};
}

RunConfig run_config_from_json(const json& j) {
  json_util::reject_unknown(j, {"seed", "synth", "preprocess", "model", "train", "paths"}, "config");
  RunConfig c;
  json_util::read(j, "seed", c.seed, "config");
  if (j.contains("synth")) c.synth = synth::synth_config_from_json(j.at("synth"));
  if (j.contains("preprocess")) c.preprocess = preprocess_config_from_json(j.at("preprocess"));
  if (j.contains("model")) c.model = model::model_config_from_json(j.at("model"));
  if (j.contains("train")) c.train = train::train_config_from_json(j.at("train"));
  if (j.contains("paths")) {
    const json& p = j.at("paths");
    json_util::reject_unknown(p, {"input", "output"}, "paths");
    json_util::read(p, "input", c.paths.input, "paths");
    json_util::read(p, "output", c.paths.output, "paths");
  }
  c.resolve();
  return c;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &j;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("--set: empty path component in '" + key + "'");
    if (!node->is_object()) throw ConfigError("--set: '" + key + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

RunConfig load_run_config(const ConfigSources& src) {
  json j = json::object();
  if (src.file) {
    const std::string text = binary::read_text(*src.file);
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("'" + src.file->string() + "': " + e.what());
    }
  }
  if (src.env_seed) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(*src.env_seed, &used);
      if (used != src.env_seed->size()) throw std::invalid_argument("trailing characters");
      j["seed"] = v;
    } catch (const std::exception&) {
      throw ConfigError("TGAT_SEED must be a non-negative integer, got '" + *src.env_seed + "'");
    }
  }
  for (const auto& o : src.overrides) apply_override(j, o);
  return run_config_from_json(j);
}

std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 12);
}

fs::path make_run_dir(const fs::path& out, const std::string& run_name, const RunConfig& c) {
  std::string name = run_name;
  if (name.empty()) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
    name = std::string(stamp) + "_" + config_hash(c);
    for (int n = 2; fs::exists(out / name); ++n) name = std::string(stamp) + "_" + config_hash(c) + "-" + std::to_string(n);
  }
  const fs::path dir = out / name;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create run directory '" + dir.string() + "': " + ec.message());
  return dir;
}

}  // namespace tgat::cli
