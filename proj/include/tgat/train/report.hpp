#pragma once

#include <filesystem>

#include "json.hpp"
#include "tgat/train/trainer.hpp"

namespace tgat::train {

nlohmann::json metrics_json(const Metrics& m);
nlohmann::json summary_json(const CvResult& cv, const nlohmann::json& config_echo, std::uint64_t seed);

/// summary.json, fold<k>_confusion.csv, fold<k>_history.csv and
/// fold_accuracies.csv under `dir`. Contents depend only on the results, so
/// identical runs produce identical bytes.
void write_reports(const std::filesystem::path& dir, const CvResult& cv, const nlohmann::json& config_echo,
                   std::uint64_t seed);

}  // namespace tgat::train
