#include "tgat/train/schedule.hpp"

#include <algorithm>

#include "tgat/error.hpp"

namespace tgat::train {

double ReduceOnPlateau::step(double val_loss) {
  if (!(factor > 0.0 && factor < 1.0)) throw ParameterError("reduce_on_plateau: factor must lie in (0, 1)");
  if (val_loss < best - min_delta) {
    best = val_loss;
    bad_epochs = 0;
    return lr;
  }
  if (++bad_epochs >= patience) {
    lr = std::max(lr * factor, min_lr);
    bad_epochs = 0;
  }
  return lr;
}

StopDecision EarlyStopping::step(double val_loss) {
  if (patience == 0) throw ParameterError("early_stop: patience must be at least 1");
  ++epoch;
  StopDecision d;
  if (val_loss < best - min_delta) {
    best = val_loss;
    best_epoch = epoch;
    bad_epochs = 0;
    d.is_best = true;
    return d;
  }
  d.stop = ++bad_epochs >= patience;
  return d;
}

}  // namespace tgat::train
