#include "tgat/train/metrics.hpp"

#include <string>

#include "tgat/error.hpp"

namespace tgat::train {

Metrics compute_metrics(const Confusion& c) {
  const std::size_t k = c.size();
  if (k == 0) throw ParameterError("compute_metrics: empty confusion matrix");
  double total = 0.0;
  for (const auto& row : c) {
    if (row.size() != k) throw ParameterError("compute_metrics: confusion matrix must be square");
    for (auto v : row) {
      if (v < 0) throw ParameterError("compute_metrics: negative count " + std::to_string(v));
      total += static_cast<double>(v);
    }
  }
  if (total == 0.0) throw ParameterError("compute_metrics: confusion matrix has no samples");

  std::vector<double> row_sum(k, 0.0), col_sum(k, 0.0);
  double trace = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const auto v = static_cast<double>(c[i][j]);
      row_sum[i] += v;
      col_sum[j] += v;
      if (i == j) trace += v;
    }

  Metrics m;
  m.confusion = c;
  m.accuracy = trace / total;
  for (std::size_t i = 0; i < k; ++i) {
    const auto tp = static_cast<double>(c[i][i]);
    const double p = col_sum[i] > 0.0 ? tp / col_sum[i] : 0.0;
    const double r = row_sum[i] > 0.0 ? tp / row_sum[i] : 0.0;
    m.precision += p;
    m.recall += r;
    m.f1 += p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  m.precision /= static_cast<double>(k);
  m.recall /= static_cast<double>(k);
  m.f1 /= static_cast<double>(k);

  double pe = 0.0;
  for (std::size_t i = 0; i < k; ++i) pe += (row_sum[i] / total) * (col_sum[i] / total);
  m.kappa = pe >= 1.0 ? 0.0 : (m.accuracy - pe) / (1.0 - pe);
  return m;
}

Confusion confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted, std::size_t classes) {
  if (truth.size() != predicted.size()) throw ShapeError("confusion_matrix: truth/prediction length mismatch");
  Confusion c(classes, std::vector<std::int64_t>(classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || predicted[i] < 0 || static_cast<std::size_t>(truth[i]) >= classes ||
        static_cast<std::size_t>(predicted[i]) >= classes)
      throw IndexError("confusion_matrix: label outside [0, " + std::to_string(classes) + ")");
    ++c[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
  }
  return c;
}

}  // namespace tgat::train
