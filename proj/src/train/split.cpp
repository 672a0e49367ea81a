#include "tgat/train/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tgat/error.hpp"
#include "tgat/numerics/rng.hpp"

namespace tgat::train {

namespace {

// Distinct keys among `indices`, sorted, then shuffled.
std::vector<std::string> shuffled_keys(const std::vector<std::size_t>& indices, const std::vector<std::string>& groups,
                                       std::uint64_t seed) {
  std::vector<std::string> keys;
  for (std::size_t i : indices) keys.push_back(groups.at(i));
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::vector<std::size_t> order(keys.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle_indices(order, seed);
  std::vector<std::string> out;
  for (std::size_t i : order) out.push_back(keys[i]);
  return out;
}

}  // namespace

void shuffle_indices(std::vector<std::size_t>& v, std::uint64_t seed) {
  numerics::CounterRng rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::vector<Split> grouped_kfold(const std::vector<std::string>& groups, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ParameterError("grouped_kfold: k must be at least 2");
  std::vector<std::size_t> all(groups.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto keys = shuffled_keys(all, groups, seed);
  if (keys.size() < k)
    throw ParameterError("grouped_kfold: " + std::to_string(keys.size()) + " trials cannot fill " + std::to_string(k) +
                         " folds");

  std::map<std::string, std::size_t> fold_of;
  const std::size_t base = keys.size() / k, extra = keys.size() % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t n = base + (f < extra ? 1 : 0);
    for (std::size_t j = 0; j < n; ++j) fold_of[keys[pos++]] = f;
  }

  std::vector<Split> out(k);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const std::size_t f = fold_of.at(groups[i]);
    for (std::size_t g = 0; g < k; ++g) (g == f ? out[g].test : out[g].train).push_back(i);
  }
  return out;
}

Split grouped_holdout(const std::vector<std::size_t>& indices, const std::vector<std::string>& groups,
                      double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("validation_fraction must lie in (0, 1)");
  const auto keys = shuffled_keys(indices, groups, seed);
  if (keys.size() < 2)
    throw ConfigError("validation split: need at least 2 training trials, got " + std::to_string(keys.size()));
  auto n_hold = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(keys.size())));
  n_hold = std::clamp<std::size_t>(n_hold, 1, keys.size() - 1);
  std::vector<std::string> held(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n_hold));
  std::sort(held.begin(), held.end());

  Split s;
  for (std::size_t i : indices)
    (std::binary_search(held.begin(), held.end(), groups.at(i)) ? s.test : s.train).push_back(i);
  return s;
}

}  // namespace tgat::train
