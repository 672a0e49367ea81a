#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tgat::train {

struct Split {
  std::vector<std::size_t> train;  // sample indices
  std::vector<std::size_t> test;
};

/// Partitions the distinct group keys (trial ids) into k folds whose sizes
/// differ by at most one group (earlier folds take the remainder); every
/// sample follows its group. Groups are sorted, then shuffled under `seed`.
/// Throws ParameterError when k < 2 or there are fewer groups than k.
std::vector<Split> grouped_kfold(const std::vector<std::string>& groups, std::size_t k, std::uint64_t seed);

/// Moves round(fraction * groups) whole groups (at least one, at most all but
/// one) out of `indices` into the second half of the split.
Split grouped_holdout(const std::vector<std::size_t>& indices, const std::vector<std::string>& groups,
                      double fraction, std::uint64_t seed);

/// Fisher-Yates shuffle driven by the counter RNG.
void shuffle_indices(std::vector<std::size_t>& v, std::uint64_t seed);

}  // namespace tgat::train
