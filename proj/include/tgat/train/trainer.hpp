#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tgat/graph/graph.hpp"
#include "tgat/model/config.hpp"
#include "tgat/model/params.hpp"
#include "tgat/train/metrics.hpp"
#include "tgat/train/split.hpp"

namespace tgat::train {

struct TrainConfig {
  double learning_rate = 3e-4;
  double weight_decay = 1e-3;
  double label_smoothing = 0.1;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 150;
  std::size_t early_stop_patience = 15;
  double scheduler_factor = 0.5;
  std::size_t scheduler_patience = 5;
  double min_delta = 1e-4;
  std::size_t k_folds = 5;
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;  // set from the run config's top-level seed

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
/// Does not read "seed"; unknown keys are a ConfigError.
TrainConfig train_config_from_json(const nlohmann::json& j);

using Dataset = std::vector<graph::EEGGraph>;

/// "subject/trial": the unit that must never straddle a split.
std::string group_key(const graph::EEGGraph& g);
std::vector<std::string> group_keys(const Dataset& data);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;  // rate used during the epoch
};

struct FoldResult {
  std::size_t fold = 0;
  Metrics metrics;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  std::vector<EpochRecord> history;
  std::vector<std::string> train_groups, val_groups, test_groups;
  model::ModelParams best_params;
};

struct Evaluation {
  double loss = 0.0;
  std::vector<int> predicted;
  std::vector<int> truth;
  Confusion confusion;
};

/// Eval-mode pass over `indices` in mini-batches.
Evaluation evaluate(const Dataset& data, const std::vector<std::size_t>& indices, model::ModelParams& params,
                    const model::ModelConfig& mcfg, std::size_t batch_size, double label_smoothing);

struct TrainHooks {
  std::function<void(std::size_t fold, const EpochRecord&)> on_epoch;
};

/// Inner grouped validation split, shuffled mini-batches with AdamW,
/// plateau scheduling and early stopping on validation loss; the best epoch's
/// parameters are restored before the test evaluation.
FoldResult train_fold(const Dataset& data, const Split& split, const model::ModelConfig& mcfg, const TrainConfig& tcfg,
                      std::size_t fold, const TrainHooks& hooks = {});

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // population
};

struct CvSummary {
  MetricSummary accuracy, precision, recall, f1, kappa;
};

struct CvResult {
  std::vector<FoldResult> folds;
  CvSummary summary;
};

CvSummary summarize(const std::vector<FoldResult>& folds);

/// k trial-grouped folds; folds run in parallel when threads are available.
CvResult cross_validate(const Dataset& data, const model::ModelConfig& mcfg, const TrainConfig& tcfg,
                        const TrainHooks& hooks = {});

}  // namespace tgat::train
