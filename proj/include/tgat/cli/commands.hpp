#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tgat/cli/run_config.hpp"
#include "tgat/synth/synth.hpp"
#include "tgat/train/trainer.hpp"

namespace tgat::cli {

// Exit codes, stable across releases.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // gradcheck over tolerance, or an unexpected error
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitData = 4;
inline constexpr int kExitNumeric = 5;

enum class Ablation { none, no_tdrop, no_tattn, no_both };

/// "none", "no-tdrop", "no-tattn", "no-both"; "all" expands to all four.
std::vector<Ablation> parse_ablation(const std::string& name);
std::string ablation_name(Ablation a);
model::ModelConfig apply_ablation(model::ModelConfig m, Ablation a);

struct RunTarget {
  std::filesystem::path out = "runs";
  std::string run_name;  // empty: timestamp + config hash
};

struct SynthOutcome {
  std::filesystem::path run_dir;
  synth::DatasetFiles files;
};
SynthOutcome cmd_synth(const RunConfig& cfg, const RunTarget& target);

struct PreprocessOutcome {
  std::filesystem::path run_dir;
  std::size_t recordings = 0, epochs = 0, skipped = 0, segments = 0;
};
/// `input` is a dataset directory (manifest.json or TGR headers) or one header.
PreprocessOutcome cmd_preprocess(const RunConfig& cfg, const std::filesystem::path& input, const RunTarget& target);

struct ArmOutcome {
  Ablation ablation = Ablation::none;
  std::filesystem::path dir;
  train::CvResult cv;
};
struct TrainOutcome {
  std::filesystem::path run_dir;
  std::vector<ArmOutcome> arms;
};
/// One arm writes its reports into the run directory; several arms get one
/// subdirectory each plus ablation.csv / ablation.json side by side.
TrainOutcome cmd_train(const RunConfig& cfg, const std::filesystem::path& archive, const std::vector<Ablation>& arms,
                       const RunTarget& target, std::ostream* progress = nullptr);

struct EvaluateOutcome {
  std::filesystem::path run_dir;
  train::Metrics metrics;
  double loss = 0.0;
  std::size_t samples = 0;
};
/// `split` is "test" (the trials recorded in the checkpoint) or "all". When
/// `cfg` is given, its model must match the checkpoint's parameter shapes.
EvaluateOutcome cmd_evaluate(const std::filesystem::path& checkpoint, const std::filesystem::path& archive,
                             const std::string& split, const std::optional<RunConfig>& cfg, const RunTarget& target);

/// Parses argv, runs one command and maps errors to exit codes.
int main_entry(int argc, char** argv);

}  // namespace tgat::cli
