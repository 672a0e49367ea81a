#pragma once

#include <cstddef>

#include "json.hpp"

namespace tgat::model {

inline constexpr std::size_t kInputLength = 256;
inline constexpr std::size_t kKernelLengths[3] = {128, 64, 32};

struct ModelConfig {
  std::size_t f1 = 8, f2 = 8, f3 = 8;
  std::size_t spatial_kernel = 1;  // depthwise kernel width along the node axis
  double spatial_dropout = 0.2;
  std::size_t temporal_segments = 8;

  bool enable_temporal_attention = true;
  bool enable_temporal_dropout = true;
  double temporal_dropout_p = 0.1;
  bool rescale_temporal_dropout = false;

  std::size_t gat1_heads = 4;
  std::size_t gat1_head_dim = 16;
  bool gat1_concat = true;
  std::size_t gat2_dim = 32;

  std::size_t classifier_hidden = 32;
  double classifier_dropout = 0.3;
  std::size_t classes = 2;

  std::size_t gat1_out() const noexcept { return gat1_concat ? gat1_heads * gat1_head_dim : gat1_head_dim; }

  /// Throws ConfigError on inconsistent sizes or probabilities outside [0, 1).
  void validate() const;
};

nlohmann::json to_json(const ModelConfig& c);
/// Keys absent from `j` keep their defaults; unknown keys are a ConfigError.
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace tgat::model
