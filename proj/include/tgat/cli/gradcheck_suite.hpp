#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tgat::cli {

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t coordinates = 0;
  double max_abs_error = 0.0;
  double difference_quantum = 0.0;  // resolution of the central difference
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double tolerance = 1e-4;

  const GradCheckEntry& worst() const;
  bool passed() const;
};

struct GradCheckSuiteOptions {
  std::size_t draws = 10;        // random inputs per op
  std::size_t model_coords = 0;  // probed coordinates per parameter group; 0 = all
  bool inject_fault = false;     // adds an op whose backward is 1% off
};

/// Central differences (step 1e-5) on every differentiable op, the training
/// loss, and the full model (C=4, B=2) for each parameter group separately.
GradCheckReport run_gradcheck_suite(const GradCheckSuiteOptions& opts = {});

}  // namespace tgat::cli
