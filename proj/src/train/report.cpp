#include "tgat/train/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "tgat/binary_io.hpp"

namespace tgat::train {

namespace {

// Shortest text that reads back to the same double.
std::string num(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

nlohmann::json summary_entry(const MetricSummary& s) { return {{"mean", s.mean}, {"std", s.std}}; }

}  // namespace

nlohmann::json metrics_json(const Metrics& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall},
          {"f1", m.f1},             {"kappa", m.kappa},         {"confusion", m.confusion}};
}

nlohmann::json summary_json(const CvResult& cv, const nlohmann::json& config_echo, std::uint64_t seed) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : cv.folds) {
    nlohmann::json j = metrics_json(f.metrics);
    j["fold"] = f.fold;
    j["best_epoch"] = f.best_epoch;
    j["epochs_run"] = f.epochs_run;
    j["test_trials"] = f.test_groups;
    folds.push_back(std::move(j));
  }
  return {{"seed", seed},
          {"config", config_echo},
          {"folds", std::move(folds)},
          {"summary",
           {{"accuracy", summary_entry(cv.summary.accuracy)},
            {"precision", summary_entry(cv.summary.precision)},
            {"recall", summary_entry(cv.summary.recall)},
            {"f1", summary_entry(cv.summary.f1)},
            {"kappa", summary_entry(cv.summary.kappa)}}}};
}

void write_reports(const std::filesystem::path& dir, const CvResult& cv, const nlohmann::json& config_echo,
                   std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  binary::write_text(dir / "summary.json", summary_json(cv, config_echo, seed).dump(2) + "\n");

  std::ostringstream acc;
  for (const auto& f : cv.folds) {
    acc << num(f.metrics.accuracy) << "\n";

    std::ostringstream conf;
    const std::size_t k = f.metrics.confusion.size();
    conf << "truth\\predicted";
    for (std::size_t c = 0; c < k; ++c) conf << ",class" << c;
    conf << "\n";
    for (std::size_t r = 0; r < k; ++r) {
      conf << "class" << r;
      for (auto v : f.metrics.confusion[r]) conf << "," << v;
      conf << "\n";
    }
    binary::write_text(dir / ("fold" + std::to_string(f.fold) + "_confusion.csv"), conf.str());

    std::ostringstream hist;
    hist << "epoch,train_loss,val_loss,lr\n";
    for (const auto& e : f.history)
      hist << e.epoch << "," << num(e.train_loss) << "," << num(e.val_loss) << "," << num(e.lr) << "\n";
    binary::write_text(dir / ("fold" + std::to_string(f.fold) + "_history.csv"), hist.str());
  }
  binary::write_text(dir / "fold_accuracies.csv", acc.str());
}

}  // namespace tgat::train
