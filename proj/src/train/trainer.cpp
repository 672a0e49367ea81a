#include "tgat/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "tgat/error.hpp"
#include "tgat/json_util.hpp"
#include "tgat/model/model.hpp"
#include "tgat/numerics/rng.hpp"
#include "tgat/train/loss.hpp"
#include "tgat/train/optim.hpp"
#include "tgat/train/schedule.hpp"

namespace tgat::train {

using numerics::CounterRng;
using numerics::Mode;
using numerics::Tape;

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be positive");
  if (!(weight_decay >= 0.0)) throw ConfigError("train.weight_decay must be non-negative");
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) throw ConfigError("train.label_smoothing must lie in [0, 1)");
  if (batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (max_epochs == 0) throw ConfigError("train.max_epochs must be positive");
  if (early_stop_patience == 0) throw ConfigError("train.early_stop_patience must be positive");
  if (!(scheduler_factor > 0.0 && scheduler_factor < 1.0)) throw ConfigError("train.scheduler_factor must lie in (0, 1)");
  if (scheduler_patience == 0) throw ConfigError("train.scheduler_patience must be positive");
  if (!(min_delta >= 0.0)) throw ConfigError("train.min_delta must be non-negative");
  if (k_folds < 2) throw ConfigError("train.k_folds must be at least 2");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw ConfigError("train.validation_fraction must lie in (0, 1)");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"weight_decay", c.weight_decay},
          {"label_smoothing", c.label_smoothing},
          {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},
          {"early_stop_patience", c.early_stop_patience},
          {"scheduler_factor", c.scheduler_factor},
          {"scheduler_patience", c.scheduler_patience},
          {"min_delta", c.min_delta},
          {"k_folds", c.k_folds},
          {"validation_fraction", c.validation_fraction}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  using json_util::read;
  constexpr std::string_view s = "train";
  json_util::reject_unknown(j,
                            {"learning_rate", "weight_decay", "label_smoothing", "batch_size", "max_epochs",
                             "early_stop_patience", "scheduler_factor", "scheduler_patience", "min_delta", "k_folds",
                             "validation_fraction"},
                            s);
  TrainConfig c;
  read(j, "learning_rate", c.learning_rate, s);
  read(j, "weight_decay", c.weight_decay, s);
  read(j, "label_smoothing", c.label_smoothing, s);
  read(j, "batch_size", c.batch_size, s);
  read(j, "max_epochs", c.max_epochs, s);
  read(j, "early_stop_patience", c.early_stop_patience, s);
  read(j, "scheduler_factor", c.scheduler_factor, s);
  read(j, "scheduler_patience", c.scheduler_patience, s);
  read(j, "min_delta", c.min_delta, s);
  read(j, "k_folds", c.k_folds, s);
  read(j, "validation_fraction", c.validation_fraction, s);
  c.validate();
  return c;
}

std::string group_key(const graph::EEGGraph& g) { return g.subject_id + "/" + g.trial_id; }

std::vector<std::string> group_keys(const Dataset& data) {
  std::vector<std::string> k;
  k.reserve(data.size());
  for (const auto& g : data) k.push_back(group_key(g));
  return k;
}

namespace {

graph::GraphBatch make_batch(const Dataset& data, const std::vector<std::size_t>& idx, std::size_t begin,
                             std::size_t end) {
  std::vector<const graph::EEGGraph*> ptrs;
  for (std::size_t i = begin; i < end; ++i) ptrs.push_back(&data.at(idx[i]));
  return graph::batch_graphs(ptrs);
}

std::vector<std::string> distinct_groups(const std::vector<std::string>& keys, const std::vector<std::size_t>& idx) {
  std::vector<std::string> g;
  for (std::size_t i : idx) g.push_back(keys[i]);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

MetricSummary stats(const std::vector<FoldResult>& folds, double Metrics::*field) {
  MetricSummary s;
  if (folds.empty()) return s;
  for (const auto& f : folds) s.mean += f.metrics.*field;
  s.mean /= static_cast<double>(folds.size());
  for (const auto& f : folds) s.std += (f.metrics.*field - s.mean) * (f.metrics.*field - s.mean);
  s.std = std::sqrt(s.std / static_cast<double>(folds.size()));
  return s;
}

}  // namespace

Evaluation evaluate(const Dataset& data, const std::vector<std::size_t>& indices, model::ModelParams& params,
                    const model::ModelConfig& mcfg, std::size_t batch_size, double label_smoothing) {
  if (indices.empty()) throw ContractError("evaluate: no samples");
  Evaluation ev;
  double loss_sum = 0.0;
  for (std::size_t b = 0; b < indices.size(); b += batch_size) {
    const std::size_t e = std::min(indices.size(), b + batch_size);
    const graph::GraphBatch batch = make_batch(data, indices, b, e);
    Tape tape;
    model::BoundParams p(tape, params, false);
    const auto out = model::model_forward(tape, batch, p, params, mcfg, Mode::eval, CounterRng(0));
    const numerics::Tensor& logits = out.logits.value();
    loss_sum += label_smoothed_ce(logits, batch.labels, label_smoothing).loss * static_cast<double>(e - b);
    for (std::size_t i = 0; i < batch.num_graphs; ++i) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < logits.dim(1); ++c)
        if (logits.at(i, c) > logits.at(i, best)) best = c;
      ev.predicted.push_back(static_cast<int>(best));
      ev.truth.push_back(batch.labels[i]);
    }
  }
  ev.loss = loss_sum / static_cast<double>(indices.size());
  ev.confusion = confusion_matrix(ev.truth, ev.predicted, mcfg.classes);
  return ev;
}

FoldResult train_fold(const Dataset& data, const Split& split, const model::ModelConfig& mcfg,
                      const TrainConfig& tcfg, std::size_t fold, const TrainHooks& hooks) {
  mcfg.validate();
  tcfg.validate();
  if (split.train.empty() || split.test.empty()) throw ContractError("train_fold: empty train or test split");

  const std::vector<std::string> keys = group_keys(data);
  const CounterRng root = CounterRng(tcfg.seed).split(0xF01D + fold);
  const Split inner = grouped_holdout(split.train, keys, tcfg.validation_fraction, root.split(1).next_u64());
  if (inner.test.empty()) throw ConfigError("train_fold: empty validation split");

  FoldResult r;
  r.fold = fold;
  r.train_groups = distinct_groups(keys, inner.train);
  r.val_groups = distinct_groups(keys, inner.test);
  r.test_groups = distinct_groups(keys, split.test);
  for (const auto& g : r.test_groups)
    if (std::binary_search(r.train_groups.begin(), r.train_groups.end(), g) ||
        std::binary_search(r.val_groups.begin(), r.val_groups.end(), g))
      throw ContractError("train_fold: trial '" + g + "' appears in both training and test data");

  model::ModelParams params = model::ModelParams::init(mcfg, root.split(2).next_u64());
  r.best_params = params;
  AdamWState opt;
  AdamWConfig acfg{tcfg.learning_rate, tcfg.weight_decay};
  ReduceOnPlateau sched{tcfg.learning_rate, tcfg.scheduler_factor, tcfg.scheduler_patience, tcfg.min_delta};
  EarlyStopping stopper{tcfg.early_stop_patience, tcfg.min_delta};

  std::vector<std::size_t> order = inner.train;
  for (std::size_t epoch = 1; epoch <= tcfg.max_epochs; ++epoch) try {
    shuffle_indices(order, root.split(3).split(epoch).next_u64());
    const CounterRng epoch_rng = root.split(4).split(epoch);
    double loss_sum = 0.0;
    acfg.lr = sched.lr;
    for (std::size_t b = 0, bi = 0; b < order.size(); b += tcfg.batch_size, ++bi) {
      const std::size_t e = std::min(order.size(), b + tcfg.batch_size);
      const graph::GraphBatch batch = make_batch(data, order, b, e);
      Tape tape;
      model::BoundParams p(tape, params, true);
      const auto out = model::model_forward(tape, batch, p, params, mcfg, Mode::train, epoch_rng.split(bi));
      numerics::Var loss = label_smoothed_ce(out.logits, batch.labels, tcfg.label_smoothing);
      loss_sum += loss.value().item() * static_cast<double>(e - b);
      tape.backward(loss);
      std::vector<numerics::Tensor> grads;
      grads.reserve(p.vars().size());
      for (const auto& v : p.vars()) grads.push_back(tape.grad(v));
      adamw_step(params.tensors, grads, opt, acfg);
    }

    const Evaluation val = evaluate(data, inner.test, params, mcfg, tcfg.batch_size, tcfg.label_smoothing);
    EpochRecord rec{epoch, loss_sum / static_cast<double>(order.size()), val.loss, acfg.lr};
    r.history.push_back(rec);
    r.epochs_run = epoch;
    if (hooks.on_epoch) hooks.on_epoch(fold, rec);

    const StopDecision d = stopper.step(val.loss);
    if (d.is_best) {
      r.best_params = params;
      r.best_epoch = epoch;
    }
    sched.step(val.loss);
    if (d.stop) break;
  } catch (const NumericError& e) {
    throw NumericError("fold " + std::to_string(fold) + ", epoch " + std::to_string(epoch) + ": " + e.what());
  }

  if (r.best_epoch == 0) {
    // validation loss never finite-improved; keep the final weights
    r.best_params = params;
    r.best_epoch = r.epochs_run;
  }
  const Evaluation test = evaluate(data, split.test, r.best_params, mcfg, tcfg.batch_size, tcfg.label_smoothing);
  r.metrics = compute_metrics(test.confusion);
  return r;
}

CvSummary summarize(const std::vector<FoldResult>& folds) {
  return {stats(folds, &Metrics::accuracy), stats(folds, &Metrics::precision), stats(folds, &Metrics::recall),
          stats(folds, &Metrics::f1), stats(folds, &Metrics::kappa)};
}

CvResult cross_validate(const Dataset& data, const model::ModelConfig& mcfg, const TrainConfig& tcfg,
                        const TrainHooks& hooks) {
  tcfg.validate();
  const std::vector<Split> splits = grouped_kfold(group_keys(data), tcfg.k_folds, tcfg.seed);
  CvResult cv;
  cv.folds.resize(splits.size());
  std::vector<std::exception_ptr> errors(splits.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t f = 0; f < splits.size(); ++f) {
    try {
      cv.folds[f] = train_fold(data, splits[f], mcfg, tcfg, f, hooks);
    } catch (...) {
      errors[f] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  cv.summary = summarize(cv.folds);
  return cv;
}

}  // namespace tgat::train
