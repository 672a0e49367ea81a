#pragma once

#include <cstdint>
#include <vector>

namespace tgat::train {

using Confusion = std::vector<std::vector<std::int64_t>>;  // [truth][prediction]

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;  // macro
  double recall = 0.0;     // macro
  double f1 = 0.0;         // macro
  double kappa = 0.0;
  Confusion confusion;
};

/// Zero denominators give 0 for that class; kappa is 0 when chance agreement is 1.
/// Throws ParameterError on negative counts, a non-square matrix or an empty total.
Metrics compute_metrics(const Confusion& confusion);

Confusion confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted, std::size_t classes);

}  // namespace tgat::train
