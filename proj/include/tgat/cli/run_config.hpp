#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tgat/dsp/preprocess.hpp"
#include "tgat/model/config.hpp"
#include "tgat/synth/synth.hpp"
#include "tgat/train/trainer.hpp"

namespace tgat::cli {

struct Paths {
  std::string input;
  std::string output = "runs";
};

/// Everything a run depends on. The top-level seed feeds both the generator
/// and the trainer.
struct RunConfig {
  std::uint64_t seed = 0;
  synth::SynthConfig synth;
  dsp::PreprocessConfig preprocess = default_preprocess();
  model::ModelConfig model;
  train::TrainConfig train;
  Paths paths;

  static dsp::PreprocessConfig default_preprocess();
  /// Copies the seed into the sections that use it and validates them.
  void resolve();
};

nlohmann::json to_json(const dsp::PreprocessConfig& c);
dsp::PreprocessConfig preprocess_config_from_json(const nlohmann::json& j);

/// Every field, defaults included.
nlohmann::json to_json(const RunConfig& c);
/// Strict: unknown keys at any level are a ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j);

/// Applies "a.b.c=value" to `j`. The value is parsed as JSON when possible
/// and taken as a string otherwise.
void apply_override(nlohmann::json& j, const std::string& assignment);

struct ConfigSources {
  std::optional<std::filesystem::path> file;
  std::vector<std::string> overrides;
  std::optional<std::string> env_seed;  // value of TGAT_SEED, if set
};

/// file, then TGAT_SEED, then --set overrides. Malformed JSON is a
/// ConfigError carrying the parser's line and column.
RunConfig load_run_config(const ConfigSources& src);

/// First 12 hex digits of the FNV-1a hash of the resolved config.
std::string config_hash(const RunConfig& c);

/// <out>/<run_name>, or <out>/<UTC timestamp>_<config hash> when the name is
/// empty. Created on return.
std::filesystem::path make_run_dir(const std::filesystem::path& out, const std::string& run_name, const RunConfig& c);

}  // namespace tgat::cli
