#include "tgat/model/config.hpp"

#include "tgat/error.hpp"
#include "tgat/json_util.hpp"

namespace tgat::model {

namespace {

void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p < 1.0)) throw ConfigError(std::string("model.") + name + " must lie in [0, 1)");
}

void check_positive(std::size_t v, const char* name) {
  if (v == 0) throw ConfigError(std::string("model.") + name + " must be positive");
}

}  // namespace

void ModelConfig::validate() const {
  check_positive(f1, "f1");
  check_positive(f2, "f2");
  check_positive(f3, "f3");
  check_positive(spatial_kernel, "spatial_kernel");
  check_positive(temporal_segments, "temporal_segments");
  check_positive(gat1_heads, "gat1_heads");
  check_positive(gat1_head_dim, "gat1_head_dim");
  check_positive(gat2_dim, "gat2_dim");
  check_positive(classifier_hidden, "classifier_hidden");
  if (classes < 2) throw ConfigError("model.classes must be at least 2");
  if (kInputLength % temporal_segments != 0)
    throw ConfigError("model.temporal_segments must divide the segment length " + std::to_string(kInputLength));
  check_prob(spatial_dropout, "spatial_dropout");
  check_prob(temporal_dropout_p, "temporal_dropout_p");
  check_prob(classifier_dropout, "classifier_dropout");
}

nlohmann::json to_json(const ModelConfig& c) {
  return {
      {"f1", c.f1},
      {"f2", c.f2},
      {"f3", c.f3},
      {"spatial_kernel", c.spatial_kernel},
      {"spatial_dropout", c.spatial_dropout},
      {"temporal_segments", c.temporal_segments},
      {"enable_temporal_attention", c.enable_temporal_attention},
      {"enable_temporal_dropout", c.enable_temporal_dropout},
      {"temporal_dropout_p", c.temporal_dropout_p},
      {"rescale_temporal_dropout", c.rescale_temporal_dropout},
      {"gat1_heads", c.gat1_heads},
      {"gat1_head_dim", c.gat1_head_dim},
      {"gat1_concat", c.gat1_concat},
      {"gat2_dim", c.gat2_dim},
      {"classifier_hidden", c.classifier_hidden},
      {"classifier_dropout", c.classifier_dropout},
      {"classes", c.classes},
  };
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  using json_util::read;
  constexpr std::string_view s = "model";
  json_util::reject_unknown(j,
                            {"f1", "f2", "f3", "spatial_kernel", "spatial_dropout", "temporal_segments",
                             "enable_temporal_attention", "enable_temporal_dropout", "temporal_dropout_p",
                             "rescale_temporal_dropout", "gat1_heads", "gat1_head_dim", "gat1_concat", "gat2_dim",
                             "classifier_hidden", "classifier_dropout", "classes"},
                            s);
  ModelConfig c;
  read(j, "f1", c.f1, s);
  read(j, "f2", c.f2, s);
  read(j, "f3", c.f3, s);
  read(j, "spatial_kernel", c.spatial_kernel, s);
  read(j, "spatial_dropout", c.spatial_dropout, s);
  read(j, "temporal_segments", c.temporal_segments, s);
  read(j, "enable_temporal_attention", c.enable_temporal_attention, s);
  read(j, "enable_temporal_dropout", c.enable_temporal_dropout, s);
  read(j, "temporal_dropout_p", c.temporal_dropout_p, s);
  read(j, "rescale_temporal_dropout", c.rescale_temporal_dropout, s);
  read(j, "gat1_heads", c.gat1_heads, s);
  read(j, "gat1_head_dim", c.gat1_head_dim, s);
  read(j, "gat1_concat", c.gat1_concat, s);
  read(j, "gat2_dim", c.gat2_dim, s);
  read(j, "classifier_hidden", c.classifier_hidden, s);
  read(j, "classifier_dropout", c.classifier_dropout, s);
  read(j, "classes", c.classes, s);
  c.validate();
  return c;
}

}  // namespace tgat::model
