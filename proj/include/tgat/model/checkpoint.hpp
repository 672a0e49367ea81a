#pragma once

#include <cstdint>
#include <filesystem>

#include "json.hpp"
#include "tgat/model/config.hpp"
#include "tgat/model/params.hpp"

namespace tgat::model {

// File layout: "TGATCKPT1\n", u64 LE manifest length, manifest JSON, then the
// float64 LE blobs in manifest order (parameters, then batch-norm running
// mean/var per stage).

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  std::uint64_t seed = 0;
  nlohmann::json extra = nlohmann::json::object();
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

/// Rebuilds the parameter set from the stored config and validates every
/// stored shape against it. Throws DataError on any mismatch or truncation.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tgat::model
