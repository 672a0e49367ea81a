#pragma once

#include <cstddef>
#include <limits>

namespace tgat::train {

/// Multiplies lr by `factor` once the loss has failed to beat the best value
/// by `min_delta` for `patience` consecutive epochs; the count then restarts.
struct ReduceOnPlateau {
  double lr = 3e-4;
  double factor = 0.5;
  std::size_t patience = 5;
  double min_delta = 1e-4;
  double min_lr = 1e-6;
  double best = std::numeric_limits<double>::infinity();
  std::size_t bad_epochs = 0;

  double step(double val_loss);
};

struct StopDecision {
  bool stop = false;
  bool is_best = false;
};

/// Stops after `patience` consecutive epochs without a min_delta improvement.
struct EarlyStopping {
  std::size_t patience = 15;
  double min_delta = 1e-4;
  double best = std::numeric_limits<double>::infinity();
  std::size_t bad_epochs = 0;
  std::size_t epoch = 0;
  std::size_t best_epoch = 0;  // 1-based, 0 before the first step

  StopDecision step(double val_loss);
};

}  // namespace tgat::train
